//! Closed-form coefficient tables for the named invariant operators, and the
//! spanning sets that realize each case of the classification.
//!
//! Primitive tables (de Rham differential, Poisson bracket, the binary list,
//! the antisymmetric determinant operators and the new ternary families) are
//! written out once. Everything else is assembled from them with
//! [`DensityOp::insert`] and [`DensityOp::permute`] through the small [`Expr`]
//! builder, so a slip in a primitive shows up in every composite.

use crate::error::{Error, Result};
use crate::opcore::{DensityOp, MultiIndex, Permutation3};
use crate::scalars::{q, QuadExt, Rational, Scalar};

fn c<S: Scalar>(num: i64, den: i64) -> S {
    S::from_rational(&q(num, den))
}

fn int<S: Scalar>(n: i64) -> S {
    S::from_int(n)
}

/// The multiplication operator `f_1 ··· f_p`.
pub fn scalar_op<S: Scalar>(weights: &[S]) -> DensityOp<S> {
    DensityOp::new(weights.to_vec(), 0, [(vec![0; weights.len()], S::one())])
        .expect("arity checked by caller")
}

/// `d : F_0 → F_1`.
pub fn de_rham<S: Scalar>() -> DensityOp<S> {
    DensityOp::new(vec![S::zero()], 1, [(vec![1], S::one())]).expect("static table")
}

/// `{φ(dx)^λ, ψ(dx)^μ} = -λ φ ψ' + μ φ' ψ`.
///
/// Vanishes identically at `λ = μ = 0`; check [`DensityOp::is_degenerate`].
pub fn poisson<S: Scalar>(lambda: S, mu: S) -> DensityOp<S> {
    DensityOp::new(
        vec![lambda.clone(), mu.clone()],
        1,
        [(vec![1, 0], mu), (vec![0, 1], -lambda)],
    )
    .expect("static shape")
}

/// The binary operators of order two and three.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryEntry {
    /// `F_0 ⊗ F_μ → F_{μ+2}`: `-φ'ψ' + μ φ''ψ`.
    Ord2A,
    /// `F_λ ⊗ F_0 → F_{λ+2}`: `-λ φψ'' + φ'ψ'`.
    Ord2B,
    /// `F_λ ⊗ F_{-λ-1} → F_1`.
    Ord2C,
    /// `F_0 ⊗ F_0 → F_3`: `φ'ψ'' - φ''ψ'`.
    Ord3A,
    /// `F_0 ⊗ F_{-2} → F_1`.
    Ord3B,
    /// `F_{-2} ⊗ F_0 → F_1`.
    Ord3C,
    /// `F_{-2/3} ⊗ F_{-2/3} → F_{5/3}`.
    Grozman,
}

impl BinaryEntry {
    pub const ALL: [BinaryEntry; 7] = [
        BinaryEntry::Ord2A,
        BinaryEntry::Ord2B,
        BinaryEntry::Ord2C,
        BinaryEntry::Ord3A,
        BinaryEntry::Ord3B,
        BinaryEntry::Ord3C,
        BinaryEntry::Grozman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryEntry::Ord2A => "ord2_a",
            BinaryEntry::Ord2B => "ord2_b",
            BinaryEntry::Ord2C => "ord2_c",
            BinaryEntry::Ord3A => "ord3_a",
            BinaryEntry::Ord3B => "ord3_b",
            BinaryEntry::Ord3C => "ord3_c",
            BinaryEntry::Grozman => "grozman",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn order(self) -> usize {
        match self {
            BinaryEntry::Ord2A | BinaryEntry::Ord2B | BinaryEntry::Ord2C => 2,
            _ => 3,
        }
    }
}

/// Builds one of the binary operators; `weights` must lie in the entry's domain.
pub fn binary_catalog<S: Scalar>(entry: BinaryEntry, weights: [S; 2]) -> Result<DensityOp<S>> {
    let [l, m] = weights;
    let domain = |ok: bool, expected: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} is defined on {expected}, got ({l}, {m})",
                entry.name()
            )))
        }
    };
    let zero = S::zero();
    let table: Vec<(MultiIndex, S)> = match entry {
        BinaryEntry::Ord2A => {
            domain(l == zero, "(0, μ)")?;
            vec![(vec![1, 1], int::<S>(-1)), (vec![2, 0], m.clone())]
        }
        BinaryEntry::Ord2B => {
            domain(m == zero, "(λ, 0)")?;
            vec![(vec![0, 2], -l.clone()), (vec![1, 1], int::<S>(1))]
        }
        BinaryEntry::Ord2C => {
            domain(m == -l.clone() - int::<S>(1), "(λ, -λ-1)")?;
            vec![
                (vec![0, 2], -l.clone()),
                (vec![1, 1], -(l.clone() * int::<S>(2) + int::<S>(1))),
                (vec![2, 0], -(l.clone() + int::<S>(1))),
            ]
        }
        BinaryEntry::Ord3A => {
            domain(l == zero && m == zero, "(0, 0)")?;
            vec![(vec![1, 2], int::<S>(1)), (vec![2, 1], int::<S>(-1))]
        }
        BinaryEntry::Ord3B => {
            domain(l == zero && m == int::<S>(-2), "(0, -2)")?;
            vec![
                (vec![1, 2], int::<S>(1)),
                (vec![2, 1], int::<S>(3)),
                (vec![3, 0], int::<S>(2)),
            ]
        }
        BinaryEntry::Ord3C => {
            domain(l == int::<S>(-2) && m == zero, "(-2, 0)")?;
            vec![
                (vec![2, 1], int::<S>(1)),
                (vec![1, 2], int::<S>(3)),
                (vec![0, 3], int::<S>(2)),
            ]
        }
        BinaryEntry::Grozman => {
            domain(l == c::<S>(-2, 3) && m == c::<S>(-2, 3), "(-2/3, -2/3)")?;
            vec![
                (vec![3, 0], int::<S>(2)),
                (vec![2, 1], int::<S>(3)),
                (vec![1, 2], int::<S>(-3)),
                (vec![0, 3], int::<S>(-2)),
            ]
        }
    };
    DensityOp::new(vec![l, m], entry.order(), table)
}

pub fn grozman<S: Scalar>() -> DensityOp<S> {
    binary_catalog(BinaryEntry::Grozman, [c::<S>(-2, 3), c::<S>(-2, 3)]).expect("in domain")
}

/// Terms of the 3×3 determinant whose rows are derivative orders `rows` and
/// whose columns are the three arguments.
fn determinant_terms(rows: [usize; 3]) -> Vec<(MultiIndex, i64)> {
    Permutation3::all()
        .iter()
        .map(|p| {
            let idx = (0..3).map(|col| rows[p.apply(col)]).collect();
            (idx, p.sign())
        })
        .collect()
}

fn determinant_op<S: Scalar>(weight: S, blocks: &[([usize; 3], S)]) -> DensityOp<S> {
    let order = blocks[0].0.iter().sum();
    let terms = blocks.iter().flat_map(|(rows, factor)| {
        determinant_terms(*rows)
            .into_iter()
            .map(move |(idx, sign)| (idx, factor.clone() * S::from_int(sign)))
    });
    DensityOp::new(vec![weight.clone(), weight.clone(), weight], order, terms)
        .expect("blocks share one order")
}

/// `Δ_{λ,3}`: the Wronskian `det(f, f', f'')` on `∧³F_λ`.
pub fn ff_delta3<S: Scalar>(lambda: S) -> DensityOp<S> {
    determinant_op(lambda, &[([0, 1, 2], S::one())])
}

/// `d ∘ Δ_{-1,3}` on `∧³F_{-1}`.
pub fn ff_d_delta3_minus1<S: Scalar>() -> DensityOp<S> {
    de_rham()
        .insert(1, &ff_delta3(int::<S>(-1)))
        .expect("Δ_{-1,3} lands in F_0")
}

/// `Δ_{1,3} ∘ (d ⊗ d ⊗ d)` on `∧³F_0`.
pub fn ff_delta3_ddd<S: Scalar>() -> DensityOp<S> {
    let mut op = ff_delta3(int::<S>(1));
    for slot in (1..=3).rev() {
        op = op.insert(slot, &de_rham()).expect("d lands in F_1");
    }
    op
}

/// `Υ` on `∧³F_{-5/4}`, of order six.
pub fn ff_upsilon<S: Scalar>() -> DensityOp<S> {
    determinant_op(
        c::<S>(-5, 4),
        &[
            ([0, 1, 5], S::one()),
            ([0, 2, 4], c::<S>(5, 2)),
            ([1, 2, 3], int::<S>(2)),
        ],
    )
}

/// Branch of the conjugate pair `Θ_±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaSign {
    Plus,
    Minus,
}

impl ThetaSign {
    fn sign(self) -> i64 {
        match self {
            ThetaSign::Plus => 1,
            ThetaSign::Minus => -1,
        }
    }
}

fn sqrt21<S: Scalar>() -> Result<S> {
    S::sqrt21().ok_or_else(|| {
        Error::Domain(format!(
            "Θ± needs √21, which the field {} does not contain",
            S::FIELD
        ))
    })
}

/// `κ_± = -(9 ± √21)/12`.
pub fn theta_weight<S: Scalar>(sign: ThetaSign) -> Result<S> {
    let root = sqrt21::<S>()? * S::from_int(sign.sign());
    Ok(-(S::from_int(9) + root) * c::<S>(1, 12))
}

/// `Θ_±` on `∧³F_{κ_±}`: `det(f, f', f⁽⁴⁾) + 2(±√21 - 4) det(f, f'', f''')`.
pub fn ff_theta<S: Scalar>(sign: ThetaSign) -> Result<DensityOp<S>> {
    let root = sqrt21::<S>()? * S::from_int(sign.sign());
    let factor = (root - int::<S>(4)) * int::<S>(2);
    Ok(determinant_op(
        theta_weight(sign)?,
        &[([0, 1, 4], S::one()), ([0, 2, 3], factor)],
    ))
}

/// The order-three ternary family `Δ_{λ,γ,τ;3}`, defined for all weights.
pub fn delta3<S: Scalar>(lambda: S, gamma: S, tau: S) -> DensityOp<S> {
    let (l, g, t) = (lambda, gamma, tau);
    let one = S::one();
    let two = int::<S>(2);
    let three = int::<S>(3);
    let four = int::<S>(4);
    let table: Vec<(MultiIndex, S)> = vec![
        (
            vec![0, 3, 0],
            l.clone() * &t * (l.clone() - &t) * (one.clone() + &l + &t),
        ),
        (
            vec![2, 1, 0],
            t.clone()
                * (one.clone() + &g + &t)
                * (two.clone() * &l
                    + &t
                    + g.clone() * (three.clone() * &l + three.clone() * &t + &four)
                    + &two),
        ),
        (
            vec![1, 1, 1],
            (l.clone() - &g) * (g.clone() - &t) * (l.clone() - &t),
        ),
        (
            vec![1, 2, 0],
            -t.clone()
                * (one.clone() + &l + &t)
                * (two.clone() * &g
                    + &t
                    + l.clone() * (three.clone() * &g + three.clone() * &t + &four)
                    + &two),
        ),
        (
            vec![3, 0, 0],
            g.clone() * &t * (t.clone() - &g) * (one.clone() + &g + &t),
        ),
        (
            vec![2, 0, 1],
            -g.clone()
                * (one.clone() + &g + &t)
                * (g.clone()
                    + two.clone() * &l
                    + (three.clone() * &g + three.clone() * &l + &four) * &t
                    + &two),
        ),
        (
            vec![0, 0, 3],
            g.clone() * &l * (g.clone() - &l) * (one.clone() + &g + &l),
        ),
        (
            vec![1, 0, 2],
            g.clone()
                * (one.clone() + &g + &l)
                * (g.clone()
                    + two.clone() * &t
                    + l.clone() * (three.clone() * &g + three.clone() * &t + &four)
                    + &two),
        ),
        (
            vec![0, 2, 1],
            l.clone()
                * (one.clone() + &l + &t)
                * (two.clone() * &g
                    + &l
                    + (three.clone() * &g + three.clone() * &l + &four) * &t
                    + &two),
        ),
        (
            vec![0, 1, 2],
            -l.clone()
                * (one.clone() + &g + &l)
                * (l.clone()
                    + two.clone() * &t
                    + g.clone() * (three.clone() * &l + three.clone() * &t + &four)
                    + &two),
        ),
    ];
    DensityOp::new(vec![l, g, t], 3, table).expect("static shape")
}

/// `-λ(1+2λ)²(2+3λ)`, the ratio of `Δ_{λ,λ,λ;3}` to the Wronskian `Δ_{λ,3}`.
pub fn wronskian_factor<S: Scalar>(lambda: &S) -> S {
    let a = S::one() + lambda.clone() * int::<S>(2);
    -(lambda.clone() * &a * &a * (int::<S>(2) + lambda.clone() * int::<S>(3)))
}

/// `{d{φ,ψ},χ}`; needs `1 + λ + γ = 0` so that `{φ,ψ}` has weight zero.
pub fn bracket_d_bracket<S: Scalar>(lambda: S, gamma: S, tau: S) -> Result<DensityOp<S>> {
    let w = [lambda, gamma, tau];
    let [f, g, h] = vars(&w);
    f.bracket(&g)?.d()?.bracket(&h)?.finish()
}

/// `Gz(φ,ψ)χ + Gz(χ,φ)ψ + Gz(ψ,χ)φ` on `F_{-2/3}^{⊗3}`.
pub fn gz_cyclic_sum<S: Scalar>() -> DensityOp<S> {
    let w = [c::<S>(-2, 3), c::<S>(-2, 3), c::<S>(-2, 3)];
    let [f, g, h] = vars(&w);
    let terms = [
        f.gz(&g).and_then(|e| e.times(&h)),
        h.gz(&f).and_then(|e| e.times(&g)),
        g.gz(&h).and_then(|e| e.times(&f)),
    ];
    let ops: Vec<DensityOp<S>> = terms
        .into_iter()
        .map(|t| t.and_then(Expr::finish).expect("weights fit"))
        .collect();
    ops[0]
        .add(&ops[1])
        .and_then(|a| a.add(&ops[2]))
        .expect("same shape")
}

/// `Ξ : F_{-τ-3/2} ⊗ F_τ ⊗ F_τ → F_{τ+5/2}`, order four, for `τ ≠ -3/4`.
pub fn xi<S: Scalar>(tau: S) -> Result<DensityOp<S>> {
    if tau == c::<S>(-3, 4) {
        return Err(Error::Domain(
            "Ξ is not defined at τ = -3/4; use the two-parameter family xi_st".to_string(),
        ));
    }
    let t = tau;
    let a = t.clone() * (int::<S>(3) + t.clone() * int::<S>(2)); // τ(3+2τ)
    let b = t.clone() * (int::<S>(2) + t.clone() * int::<S>(3)); // τ(2+3τ)
    let e = t.clone() * (int::<S>(13) + t.clone() * int::<S>(12)); // τ(13+12τ)
    let f = int::<S>(3) + t.clone() * int::<S>(2); // 3+2τ
    let g = int::<S>(1) + t.clone(); // 1+τ
    let table: Vec<(MultiIndex, S)> = vec![
        (vec![4, 0, 0], S::zero()),
        (vec![0, 4, 0], -a.clone()),
        (vec![1, 1, 2], g.clone() * int::<S>(-10)),
        (vec![0, 0, 4], a),
        (vec![3, 1, 0], b.clone() * c::<S>(-8, 3)),
        (vec![3, 0, 1], b.clone() * c::<S>(8, 3)),
        (vec![1, 3, 0], e.clone() * c::<S>(-2, 3)),
        (vec![1, 0, 3], e * c::<S>(2, 3)),
        (vec![0, 3, 1], f.clone() * c::<S>(5, 3)),
        (vec![0, 1, 3], f * c::<S>(-5, 3)),
        (vec![2, 2, 0], b.clone() * int::<S>(-4)),
        (vec![2, 0, 2], b * int::<S>(4)),
        (vec![0, 2, 2], S::zero()),
        (vec![2, 1, 1], S::zero()),
        (vec![1, 2, 1], g * int::<S>(10)),
    ];
    let lead = -t.clone() - c::<S>(3, 2);
    DensityOp::new(vec![lead, t.clone(), t], 4, table)
}

/// `Ξ_{s,t}` on `F_{-3/4}^{⊗3}`, order four.
pub fn xi_st<S: Scalar>(s: S, t: S) -> DensityOp<S> {
    let st = s.clone() + &t;
    let table: Vec<(MultiIndex, S)> = vec![
        (vec![0, 0, 4], -st.clone()),
        (vec![3, 1, 0], (t.clone() * int::<S>(4) - &s) * c::<S>(4, 9)),
        (
            vec![3, 0, 1],
            (s.clone() + t.clone() * int::<S>(5)) * c::<S>(4, 9),
        ),
        (vec![1, 3, 0], (s.clone() * int::<S>(4) - &t) * c::<S>(4, 9)),
        (
            vec![1, 0, 3],
            (s.clone() * int::<S>(4) + t.clone() * int::<S>(5)) * c::<S>(-4, 9),
        ),
        (vec![0, 3, 1], (s.clone() * int::<S>(5) + &t) * c::<S>(4, 9)),
        (
            vec![0, 1, 3],
            (s.clone() * int::<S>(5) + t.clone() * int::<S>(4)) * c::<S>(-4, 9),
        ),
        (vec![2, 2, 0], st.clone() * c::<S>(-2, 3)),
        (vec![2, 0, 2], s.clone() * c::<S>(2, 3)),
        (vec![0, 2, 2], t.clone() * c::<S>(2, 3)),
        (vec![2, 1, 1], t.clone() * c::<S>(20, 9)),
        (vec![1, 2, 1], s.clone() * c::<S>(20, 9)),
        (vec![1, 1, 2], st * c::<S>(-20, 9)),
        (vec![0, 4, 0], s),
        (vec![4, 0, 0], t),
    ];
    DensityOp::new(vec![c::<S>(-3, 4), c::<S>(-3, 4), c::<S>(-3, 4)], 4, table)
        .expect("static shape")
}

/// `Γ : F_{-2/3} ⊗ F_{-2/3} ⊗ F_{-4/3} → F_{7/3}`, order five.
pub fn gamma_op<S: Scalar>() -> DensityOp<S> {
    let table: [([usize; 3], i64, i64); 21] = [
        ([0, 0, 5], 2, 5),
        ([0, 1, 4], 1, 1),
        ([0, 2, 3], -1, 1),
        ([0, 3, 2], -5, 2),
        ([0, 4, 1], -17, 10),
        ([0, 5, 0], -2, 5),
        ([1, 0, 4], 1, 1),
        ([1, 1, 3], 3, 2),
        ([1, 2, 2], -9, 4),
        ([1, 3, 1], -9, 4),
        ([1, 4, 0], -3, 5),
        ([2, 0, 3], -1, 1),
        ([2, 1, 2], -9, 4),
        ([2, 2, 1], 9, 2),
        ([2, 3, 0], 3, 1),
        ([3, 0, 2], -5, 2),
        ([3, 1, 1], -9, 4),
        ([3, 2, 0], 3, 1),
        ([4, 0, 1], -17, 10),
        ([4, 1, 0], -3, 5),
        ([5, 0, 0], -2, 5),
    ];
    DensityOp::new(
        vec![c::<S>(-2, 3), c::<S>(-2, 3), c::<S>(-4, 3)],
        5,
        table.iter().map(|(idx, n, d)| (idx.to_vec(), c(*n, *d))),
    )
    .expect("static table")
}

/// A partially built composite: an operator plus, for each of its slots,
/// which of the final arguments `φ = 0, ψ = 1, χ = 2` feeds it.
#[derive(Clone, Debug)]
pub struct Expr<S> {
    op: DensityOp<S>,
    vars: Vec<usize>,
}

impl<S: Scalar> Expr<S> {
    /// The bare argument `var` of weight `weight`.
    pub fn var(var: usize, weight: S) -> Self {
        Expr {
            op: scalar_op(&[weight]),
            vars: vec![var],
        }
    }

    pub fn weight(&self) -> S {
        self.op.target_weight()
    }

    /// Feeds `args` into the slots of `outer`, in order.
    pub fn apply(outer: &DensityOp<S>, args: &[&Expr<S>]) -> Result<Self> {
        if outer.arity() != args.len() {
            return Err(Error::Arity {
                expected: outer.arity(),
                got: args.len(),
            });
        }
        let mut op = outer.clone();
        for (slot, arg) in args.iter().enumerate().rev() {
            op = op.insert(slot + 1, &arg.op)?;
        }
        let vars = args.iter().flat_map(|a| a.vars.iter().copied()).collect();
        Ok(Expr { op, vars })
    }

    /// `d(self)`; requires weight zero.
    pub fn d(&self) -> Result<Self> {
        Self::apply(&de_rham(), &[self])
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Self::apply(&poisson(self.weight(), other.weight()), &[self, other])
    }

    pub fn times(&self, other: &Self) -> Result<Self> {
        Self::apply(&scalar_op(&[self.weight(), other.weight()]), &[self, other])
    }

    pub fn gz(&self, other: &Self) -> Result<Self> {
        Self::apply(&grozman(), &[self, other])
    }

    pub fn product3(a: &Self, b: &Self, c: &Self) -> Result<Self> {
        Self::apply(
            &scalar_op(&[a.weight(), b.weight(), c.weight()]),
            &[a, b, c],
        )
    }

    /// The finished ternary operator with arguments in `(φ, ψ, χ)` order.
    pub fn finish(self) -> Result<DensityOp<S>> {
        let images: [usize; 3] = self
            .vars
            .as_slice()
            .try_into()
            .map_err(|_| Error::Shape(format!("expected 3 arguments, got {:?}", self.vars)))?;
        self.op.permute(&Permutation3::new(images)?)
    }
}

/// A named member of a theorem's spanning set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative<S> {
    pub name: String,
    pub op: DensityOp<S>,
}

const GENERIC: &str = "generic";

type Builder<S> = fn(&[S; 3]) -> Result<Vec<(String, DensityOp<S>)>>;

struct Case<S> {
    label: &'static str,
    matches: fn(&[S; 3]) -> bool,
    build: Builder<S>,
}

fn vars<S: Scalar>(w: &[S; 3]) -> [Expr<S>; 3] {
    [
        Expr::var(0, w[0].clone()),
        Expr::var(1, w[1].clone()),
        Expr::var(2, w[2].clone()),
    ]
}

fn named<S: Scalar>(name: &str, e: Result<Expr<S>>) -> Result<(String, DensityOp<S>)> {
    Ok((name.to_string(), e?.finish()?))
}

fn is<S: Scalar>(x: &S, num: i64, den: i64) -> bool {
    *x == c(num, den)
}

fn all_eq<S: Scalar>(w: &[S; 3], num: i64, den: i64) -> bool {
    w.iter().all(|x| is(x, num, den))
}

fn cases<S: Scalar>(order: usize) -> Vec<Case<S>> {
    match order {
        1 => vec![
            Case {
                label: "zero weights",
                matches: |w| all_eq(w, 0, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("dphi*psi*chi", Expr::product3(&f.d()?, &g, &h))?,
                        named("phi*dpsi*chi", Expr::product3(&f, &g.d()?, &h))?,
                        named("phi*psi*dchi", Expr::product3(&f, &g, &h.d()?))?,
                    ])
                },
            },
            Case {
                label: "lambda nonzero",
                matches: |w| !w[0].is_zero(),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{phi,psi}*chi", f.bracket(&g)?.times(&h))?,
                        named("{phi,chi}*psi", f.bracket(&h)?.times(&g))?,
                    ])
                },
            },
        ],
        2 => vec![
            Case {
                label: "lambda = gamma = 0",
                matches: |w| w[0].is_zero() && w[1].is_zero(),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{phi,dpsi}*chi", f.bracket(&g.d()?)?.times(&h))?,
                        named("{chi,dphi}*psi", h.bracket(&f.d()?)?.times(&g))?,
                        named("{dpsi,chi}*phi", g.d()?.bracket(&h)?.times(&f))?,
                    ])
                },
            },
            Case {
                label: GENERIC,
                matches: |_| true,
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{{phi,psi},chi}", f.bracket(&g)?.bracket(&h))?,
                        named("{{phi,chi},psi}", f.bracket(&h)?.bracket(&g))?,
                    ])
                },
            },
        ],
        3 => vec![
            Case {
                label: "zero weights",
                matches: |w| all_eq(w, 0, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{dphi,dpsi}*chi", f.d()?.bracket(&g.d()?)?.times(&h))?,
                        named("{dchi,dphi}*psi", h.d()?.bracket(&f.d()?)?.times(&g))?,
                        named("{dpsi,dchi}*phi", g.d()?.bracket(&h.d()?)?.times(&f))?,
                        named("dphi*dpsi*dchi", Expr::product3(&f.d()?, &g.d()?, &h.d()?))?,
                    ])
                },
            },
            Case {
                label: "lambda = 0",
                matches: |w| w[0].is_zero() && !(w[1].is_zero() && w[2].is_zero()),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{{dphi,psi},chi}", f.d()?.bracket(&g)?.bracket(&h))?,
                        named("{{dphi,chi},psi}", f.d()?.bracket(&h)?.bracket(&g))?,
                    ])
                },
            },
            Case {
                label: "all weights -2/3",
                matches: |w| all_eq(w, -2, 3),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("Gz(phi,psi)*chi", f.gz(&g)?.times(&h))?,
                        named("Gz(chi,phi)*psi", h.gz(&f)?.times(&g))?,
                        named("Gz(psi,chi)*phi", g.gz(&h)?.times(&f))?,
                    ])
                },
            },
            Case {
                label: "all weights -1/2",
                matches: |w| all_eq(w, -1, 2),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{d{phi,psi},chi}", f.bracket(&g)?.d()?.bracket(&h))?,
                        named("{d{chi,phi},psi}", h.bracket(&f)?.d()?.bracket(&g))?,
                        named("{d{psi,chi},phi}", g.bracket(&h)?.d()?.bracket(&f))?,
                    ])
                },
            },
            Case {
                label: "1+lambda+tau = 0, gamma = lambda != tau",
                matches: |w| (S::one() + &w[0] + &w[2]).is_zero() && w[1] == w[0] && w[0] != w[2],
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{d{phi,chi},psi}", f.bracket(&h)?.d()?.bracket(&g))?,
                        named("{d{psi,chi},phi}", g.bracket(&h)?.d()?.bracket(&f))?,
                    ])
                },
            },
            Case {
                label: GENERIC,
                matches: |_| true,
                build: |w| {
                    Ok(vec![(
                        "Delta3(phi,psi,chi)".to_string(),
                        delta3(w[0].clone(), w[1].clone(), w[2].clone()),
                    )])
                },
            },
        ],
        4 => vec![
            Case {
                label: "lambda = gamma = 0",
                matches: |w| w[0].is_zero() && w[1].is_zero(),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{{dphi,dpsi},chi}", f.d()?.bracket(&g.d()?)?.bracket(&h))?,
                        named("{{chi,dphi},dpsi}", h.bracket(&f.d()?)?.bracket(&g.d()?))?,
                    ])
                },
            },
            Case {
                label: "weights (-2, 0, -2)",
                matches: |w| is(&w[0], -2, 1) && w[1].is_zero() && is(&w[2], -2, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("{d{dpsi,phi},chi}", g.d()?.bracket(&f)?.d()?.bracket(&h))?,
                        named("{d{dpsi,chi},phi}", g.d()?.bracket(&h)?.d()?.bracket(&f))?,
                    ])
                },
            },
            Case {
                label: "gamma = 0, lambda tau != 0",
                matches: |w| w[1].is_zero() && !w[0].is_zero() && !w[2].is_zero(),
                build: |w| {
                    let [f, g, h] = vars(w);
                    let outer = delta3(w[0].clone(), S::one(), w[2].clone());
                    Ok(vec![named(
                        "Delta3(phi,dpsi,chi)",
                        Expr::apply(&outer, &[&f, &g.d()?, &h]),
                    )?])
                },
            },
            Case {
                label: "lambda = gamma = -2/3, tau != -1",
                matches: |w| is(&w[0], -2, 3) && is(&w[1], -2, 3) && !is(&w[2], -1, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![named("{Gz(phi,psi),chi}", f.gz(&g)?.bracket(&h))?])
                },
            },
            Case {
                label: "weights (-1, -2/3, -2/3)",
                matches: |w| is(&w[0], -1, 1) && is(&w[1], -2, 3) && is(&w[2], -2, 3),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named("Gz({phi,psi},chi)", f.bracket(&g)?.gz(&h))?,
                        named("Gz({phi,chi},psi)", f.bracket(&h)?.gz(&g))?,
                    ])
                },
            },
            Case {
                label: "lambda = -3/2 - tau, gamma = tau",
                matches: |w| {
                    let t = &w[2];
                    w[1] == *t
                        && w[0] == -t.clone() - c::<S>(3, 2)
                        && !is(t, -3, 2)
                        && !is(t, -2, 3)
                        && !t.is_zero()
                        && !is(t, -3, 4)
                },
                build: |w| Ok(vec![("Xi(phi,psi,chi)".to_string(), xi(w[2].clone())?)]),
            },
            Case {
                label: "all weights -3/4",
                matches: |w| all_eq(w, -3, 4),
                build: |_| {
                    Ok(vec![
                        ("Xi_{1,0}".to_string(), xi_st(S::one(), S::zero())),
                        ("Xi_{0,1}".to_string(), xi_st(S::zero(), S::one())),
                    ])
                },
            },
        ],
        5 => vec![
            Case {
                label: "zero weights",
                matches: |w| all_eq(w, 0, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named(
                            "{{dphi,dpsi},dchi}",
                            f.d()?.bracket(&g.d()?)?.bracket(&h.d()?),
                        )?,
                        named(
                            "{{dchi,dphi},dpsi}",
                            h.d()?.bracket(&f.d()?)?.bracket(&g.d()?),
                        )?,
                    ])
                },
            },
            Case {
                label: "weights (0, 0, -2)",
                matches: |w| w[0].is_zero() && w[1].is_zero() && is(&w[2], -2, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![
                        named(
                            "{d{dphi,chi},dpsi}",
                            f.d()?.bracket(&h)?.d()?.bracket(&g.d()?),
                        )?,
                        named(
                            "{d{dpsi,chi},dphi}",
                            g.d()?.bracket(&h)?.d()?.bracket(&f.d()?),
                        )?,
                    ])
                },
            },
            Case {
                label: "lambda = gamma = 0, tau not in {-4, -2, 0}",
                matches: |w| {
                    w[0].is_zero()
                        && w[1].is_zero()
                        && !is(&w[2], -4, 1)
                        && !is(&w[2], -2, 1)
                        && !w[2].is_zero()
                },
                build: |w| {
                    let [f, g, h] = vars(w);
                    let outer = delta3(S::one(), S::one(), w[2].clone());
                    Ok(vec![named(
                        "Delta3(dphi,dpsi,chi)",
                        Expr::apply(&outer, &[&f.d()?, &g.d()?, &h]),
                    )?])
                },
            },
            Case {
                label: "weights (-2/3, -2/3, 0)",
                matches: |w| is(&w[0], -2, 3) && is(&w[1], -2, 3) && w[2].is_zero(),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![named(
                        "{Gz(phi,psi),dchi}",
                        f.gz(&g)?.bracket(&h.d()?),
                    )?])
                },
            },
            Case {
                label: "weights (-5/2, 0, 1)",
                matches: |w| is(&w[0], -5, 2) && w[1].is_zero() && is(&w[2], 1, 1),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![named(
                        "Xi(phi,dpsi,chi)",
                        Expr::apply(&xi(S::one())?, &[&f, &g.d()?, &h]),
                    )?])
                },
            },
            Case {
                label: "weights (-2/3, -2/3, -4/3)",
                matches: |w| is(&w[0], -2, 3) && is(&w[1], -2, 3) && is(&w[2], -4, 3),
                build: |_| Ok(vec![("Gamma".to_string(), gamma_op())]),
            },
            Case {
                label: "all weights kappa_+",
                matches: |w| {
                    theta_weight::<S>(ThetaSign::Plus).is_ok_and(|k| w.iter().all(|x| *x == k))
                },
                build: |_| Ok(vec![("Theta+".to_string(), ff_theta(ThetaSign::Plus)?)]),
            },
            Case {
                label: "all weights kappa_-",
                matches: |w| {
                    theta_weight::<S>(ThetaSign::Minus).is_ok_and(|k| w.iter().all(|x| *x == k))
                },
                build: |_| Ok(vec![("Theta-".to_string(), ff_theta(ThetaSign::Minus)?)]),
            },
        ],
        6 => vec![
            Case {
                label: "zero weights",
                matches: |w| all_eq(w, 0, 1),
                build: |_| {
                    Ok(vec![(
                        "Delta_{1,3}(dphi,dpsi,dchi)".to_string(),
                        ff_delta3_ddd(),
                    )])
                },
            },
            Case {
                label: "weights (0, 0, -5/2)",
                matches: |w| w[0].is_zero() && w[1].is_zero() && is(&w[2], -5, 2),
                build: |w| {
                    let [f, g, h] = vars(w);
                    Ok(vec![named(
                        "Xi(chi,dphi,dpsi)",
                        Expr::apply(&xi(S::one())?, &[&h, &f.d()?, &g.d()?]),
                    )?])
                },
            },
            Case {
                label: "all weights -5/4",
                matches: |w| all_eq(w, -5, 4),
                build: |_| Ok(vec![("Upsilon".to_string(), ff_upsilon())]),
            },
        ],
        _ => Vec::new(),
    }
}

/// How a case's normal form was carried to the requested weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Transform {
    Permute(Permutation3),
    Dualize(usize, Permutation3),
}

fn dual_weights<S: Scalar>(w: &[S; 3], order: usize, slot: usize) -> [S; 3] {
    let mu = w.iter().fold(S::from_int(order as i64), |acc, x| acc + x);
    let mut out = w.clone();
    out[slot - 1] = S::one() - mu;
    out
}

fn permuted<S: Scalar>(w: &[S; 3], sigma: &Permutation3) -> [S; 3] {
    let mut out = w.clone();
    for i in 0..3 {
        out[sigma.apply(i)] = w[i].clone();
    }
    out
}

/// The explicit spanning set for the classification case that covers
/// `(order, weights)`, found up to permutation and dualization.
///
/// Special cases are tried first under every permutation, then under
/// dualizations composed with permutations; the generic case of orders 2
/// and 3 comes last. Returns an empty list when no case
/// applies (order 0, orders above 6, or weights outside every case).
pub fn theorem_representatives<S: Scalar>(
    order: usize,
    weights: &[S; 3],
) -> Result<Vec<Representative<S>>> {
    let permutations: Vec<Transform> = Permutation3::all()
        .into_iter()
        .map(Transform::Permute)
        .collect();
    let mut dualizations = Vec::new();
    for slot in 1..=3 {
        for sigma in Permutation3::all() {
            dualizations.push(Transform::Dualize(slot, sigma));
        }
    }
    let all_cases = cases::<S>(order);
    let (generic, special): (Vec<&Case<S>>, Vec<&Case<S>>) =
        all_cases.iter().partition(|c| c.label == GENERIC);
    let mut attempts: Vec<(&Case<S>, Transform)> = Vec::new();
    for transforms in [&permutations, &dualizations] {
        for case in &special {
            attempts.extend(transforms.iter().map(|t| (*case, *t)));
        }
    }
    for case in &generic {
        attempts.extend(permutations.iter().map(|t| (*case, *t)));
    }
    for (case, t) in &attempts {
        // Weights the case's normal form must have so that undoing `t`
        // lands on `weights`.
        let (normal, sigma) = match t {
            Transform::Permute(sigma) => (permuted(weights, &sigma.inverse()), *sigma),
            Transform::Dualize(slot, sigma) => (
                permuted(&dual_weights(weights, order, *slot), &sigma.inverse()),
                *sigma,
            ),
        };
        if !(case.matches)(&normal) {
            continue;
        }
        let built = (case.build)(&normal)?;
        return built
            .into_iter()
            .map(|(name, op)| {
                let mut op = op.permute(&sigma)?;
                let mut name = name;
                if sigma != Permutation3::identity() {
                    name = format!("{name}^{:?}", sigma.images());
                }
                if let Transform::Dualize(slot, _) = t {
                    op = op.dualize(*slot)?;
                    name = format!("({name})*{slot}");
                }
                debug_assert_eq!(op.weights(), weights.as_slice());
                Ok(Representative {
                    name: format!("{name} [{}]", case.label),
                    op,
                })
            })
            .collect();
    }
    Ok(Vec::new())
}

/// A catalog listing entry.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub arity: usize,
    pub order: usize,
    pub weight_domain: &'static str,
    pub source: &'static str,
    /// Extra numeric parameters the builder needs beyond the weights.
    pub params: &'static [&'static str],
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "scalar",
        arity: 3,
        order: 0,
        weight_domain: "any (lambda, gamma, tau)",
        source: "multiplication operator",
        params: &[],
    },
    CatalogEntry {
        name: "de_rham",
        arity: 1,
        order: 1,
        weight_domain: "(0)",
        source: "exterior differential",
        params: &[],
    },
    CatalogEntry {
        name: "poisson",
        arity: 2,
        order: 1,
        weight_domain: "any (lambda, mu)",
        source: "Poisson bracket",
        params: &[],
    },
    CatalogEntry {
        name: "ord2_a",
        arity: 2,
        order: 2,
        weight_domain: "(0, mu)",
        source: "binary second-order list",
        params: &[],
    },
    CatalogEntry {
        name: "ord2_b",
        arity: 2,
        order: 2,
        weight_domain: "(lambda, 0)",
        source: "binary second-order list",
        params: &[],
    },
    CatalogEntry {
        name: "ord2_c",
        arity: 2,
        order: 2,
        weight_domain: "(lambda, -lambda-1)",
        source: "binary second-order list",
        params: &[],
    },
    CatalogEntry {
        name: "ord3_a",
        arity: 2,
        order: 3,
        weight_domain: "(0, 0)",
        source: "binary third-order list",
        params: &[],
    },
    CatalogEntry {
        name: "ord3_b",
        arity: 2,
        order: 3,
        weight_domain: "(0, -2)",
        source: "binary third-order list",
        params: &[],
    },
    CatalogEntry {
        name: "ord3_c",
        arity: 2,
        order: 3,
        weight_domain: "(-2, 0)",
        source: "binary third-order list",
        params: &[],
    },
    CatalogEntry {
        name: "grozman",
        arity: 2,
        order: 3,
        weight_domain: "(-2/3, -2/3)",
        source: "Grozman operator",
        params: &[],
    },
    CatalogEntry {
        name: "ff_delta3",
        arity: 3,
        order: 3,
        weight_domain: "(lambda, lambda, lambda)",
        source: "Feigin-Fuchs Wronskian",
        params: &[],
    },
    CatalogEntry {
        name: "ff_d_delta3_minus1",
        arity: 3,
        order: 4,
        weight_domain: "(-1, -1, -1)",
        source: "Feigin-Fuchs, d composed with the Wronskian",
        params: &[],
    },
    CatalogEntry {
        name: "ff_delta3_ddd",
        arity: 3,
        order: 6,
        weight_domain: "(0, 0, 0)",
        source: "Feigin-Fuchs, Wronskian of differentials",
        params: &[],
    },
    CatalogEntry {
        name: "ff_upsilon",
        arity: 3,
        order: 6,
        weight_domain: "(-5/4, -5/4, -5/4)",
        source: "Feigin-Fuchs Upsilon",
        params: &[],
    },
    CatalogEntry {
        name: "ff_theta_plus",
        arity: 3,
        order: 5,
        weight_domain: "kappa = -(9+sqrt21)/12, all slots",
        source: "Feigin-Fuchs Theta+",
        params: &[],
    },
    CatalogEntry {
        name: "ff_theta_minus",
        arity: 3,
        order: 5,
        weight_domain: "kappa = -(9-sqrt21)/12, all slots",
        source: "Feigin-Fuchs Theta-",
        params: &[],
    },
    CatalogEntry {
        name: "delta3",
        arity: 3,
        order: 3,
        weight_domain: "any (lambda, gamma, tau)",
        source: "new ternary order-3 family",
        params: &[],
    },
    CatalogEntry {
        name: "xi",
        arity: 3,
        order: 4,
        weight_domain: "(-tau-3/2, tau, tau), tau != -3/4",
        source: "new ternary order-4 family",
        params: &[],
    },
    CatalogEntry {
        name: "xi_st",
        arity: 3,
        order: 4,
        weight_domain: "(-3/4, -3/4, -3/4)",
        source: "new two-parameter order-4 family",
        params: &["s", "t"],
    },
    CatalogEntry {
        name: "gamma",
        arity: 3,
        order: 5,
        weight_domain: "(-2/3, -2/3, -4/3)",
        source: "new ternary order-5 operator",
        params: &[],
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

fn expect_weights(name: &str, given: &[QuadExt], expected: &[QuadExt]) -> Result<()> {
    if given.is_empty() || given == expected {
        return Ok(());
    }
    Err(Error::Domain(format!(
        "{name} is defined at {expected:?}, got {given:?}"
    )))
}

fn need(name: &str, given: &[QuadExt], n: usize) -> Result<()> {
    if given.len() != n {
        return Err(Error::Domain(format!(
            "{name} takes {n} weights, got {}",
            given.len()
        )));
    }
    Ok(())
}

/// Instantiates a catalog entry over Q(√21) (which contains every weight and
/// coefficient in the catalog). Fixed-weight entries accept an empty weight list.
pub fn build_entry(
    name: &str,
    weights: &[QuadExt],
    params: &[QuadExt],
) -> Result<DensityOp<QuadExt>> {
    let e = entry(name)?;
    if params.len() != e.params.len() {
        return Err(Error::Domain(format!(
            "{name} takes parameters {:?}, got {} values",
            e.params,
            params.len()
        )));
    }
    let w = weights;
    let fixed = |op: DensityOp<QuadExt>| -> Result<DensityOp<QuadExt>> {
        expect_weights(name, w, op.weights())?;
        Ok(op)
    };
    match name {
        "scalar" => {
            need(name, w, 3)?;
            Ok(scalar_op(w))
        }
        "de_rham" => fixed(de_rham()),
        "poisson" => {
            need(name, w, 2)?;
            Ok(poisson(w[0].clone(), w[1].clone()))
        }
        "grozman" => fixed(grozman()),
        n if BinaryEntry::from_name(n).is_some() => {
            need(name, w, 2)?;
            binary_catalog(
                BinaryEntry::from_name(n).expect("checked"),
                [w[0].clone(), w[1].clone()],
            )
        }
        "ff_delta3" => {
            need(name, w, 3)?;
            if !(w[0] == w[1] && w[1] == w[2]) {
                return Err(Error::Domain("ff_delta3 needs three equal weights".into()));
            }
            Ok(ff_delta3(w[0].clone()))
        }
        "ff_d_delta3_minus1" => fixed(ff_d_delta3_minus1()),
        "ff_delta3_ddd" => fixed(ff_delta3_ddd()),
        "ff_upsilon" => fixed(ff_upsilon()),
        "ff_theta_plus" => fixed(ff_theta(ThetaSign::Plus)?),
        "ff_theta_minus" => fixed(ff_theta(ThetaSign::Minus)?),
        "delta3" => {
            need(name, w, 3)?;
            Ok(delta3(w[0].clone(), w[1].clone(), w[2].clone()))
        }
        "xi" => {
            need(name, w, 3)?;
            let op = xi(w[2].clone())?;
            expect_weights(name, w, op.weights())?;
            Ok(op)
        }
        "xi_st" => fixed(xi_st(params[0].clone(), params[1].clone())),
        "gamma" => fixed(gamma_op()),
        _ => Err(Error::UnknownEntry(name.to_string())),
    }
}

/// Every rational-weight catalog table at a representative point of its
/// domain, for bulk checks.
pub fn sample_entries() -> Vec<(String, DensityOp<Rational>)> {
    let mut out: Vec<(String, DensityOp<Rational>)> = vec![
        (
            "scalar(1/3,-2,5/2)".into(),
            scalar_op(&[q(1, 3), q(-2, 1), q(5, 2)]),
        ),
        ("de_rham".into(), de_rham()),
        ("poisson(2/3,-1/5)".into(), poisson(q(2, 3), q(-1, 5))),
        ("grozman".into(), grozman()),
        ("ff_d_delta3_minus1".into(), ff_d_delta3_minus1()),
        ("ff_delta3_ddd".into(), ff_delta3_ddd()),
        ("ff_upsilon".into(), ff_upsilon()),
        ("gamma".into(), gamma_op()),
    ];
    let binary_points: [(BinaryEntry, [Rational; 2]); 6] = [
        (BinaryEntry::Ord2A, [q(0, 1), q(3, 7)]),
        (BinaryEntry::Ord2B, [q(-5, 3), q(0, 1)]),
        (BinaryEntry::Ord2C, [q(2, 5), q(-7, 5)]),
        (BinaryEntry::Ord3A, [q(0, 1), q(0, 1)]),
        (BinaryEntry::Ord3B, [q(0, 1), q(-2, 1)]),
        (BinaryEntry::Ord3C, [q(-2, 1), q(0, 1)]),
    ];
    for (e, w) in binary_points {
        out.push((e.name().into(), binary_catalog(e, w).expect("in domain")));
    }
    for l in [q(1, 3), q(-2, 3), q(-1, 2), q(0, 1), q(5, 2)] {
        out.push((format!("ff_delta3({l})"), ff_delta3(l)));
    }
    for (l, g, t) in [
        (q(1, 1), q(2, 1), q(3, 1)),
        (q(-1, 3), q(2, 5), q(-7, 2)),
        (q(0, 1), q(1, 1), q(2, 1)),
        (q(2, 1), q(2, 1), q(-3, 1)),
    ] {
        out.push((format!("delta3({l},{g},{t})"), delta3(l, g, t)));
    }
    for t in [q(1, 1), q(-1, 3), q(2, 7), q(-5, 2)] {
        out.push((format!("xi({t})"), xi(t).expect("tau != -3/4")));
    }
    for (s, t) in [(q(1, 1), q(0, 1)), (q(0, 1), q(1, 1)), (q(2, 3), q(-5, 1))] {
        out.push((format!("xi_st({s},{t})"), xi_st(s, t)));
    }
    out
}
