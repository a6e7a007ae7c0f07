//! Symbols of ternary operators on `R^n` that are invariant under the
//! conformal algebra `o(p+1, q+1)`, written in the six invariant contractions
//! `R_ξξ, R_ξη, R_ξζ, R_ηη, R_ηζ, R_ζζ`.
//!
//! Two routes to the invariance equations are kept apart on purpose:
//! [`conformal_defect`] pushes every term of a symbol forward through the
//! action of the inversion generators, while [`build_neqs`] writes the
//! recurrence directly, one row per target monomial. Tests compare them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearSystem;
use crate::scalars::{q, Rational};

/// Exponents `(a, b, c, d, e, f)` of `R_ξξ^a R_ξη^b R_ξζ^c R_ηη^d R_ηζ^e R_ζζ^f`.
pub type Exponents = [u32; 6];

pub const GENERATOR_NAMES: [&str; 6] = [
    "R_xixi",
    "R_xieta",
    "R_xizeta",
    "R_etaeta",
    "R_etazeta",
    "R_zetazeta",
];

/// Every exponent tuple of total degree `k`, in lexicographic order.
pub fn monomials(k: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = [0u32; 6];
    fn rec(pos: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if pos == 5 {
            cur[5] = left;
            out.push(*cur);
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalSymbol {
    pub n: u32,
    pub weights: [Rational; 3],
    pub degree: u32,
    terms: BTreeMap<Exponents, Rational>,
}

impl ConformalSymbol {
    pub fn new(
        n: u32,
        weights: [Rational; 3],
        degree: u32,
        terms: impl IntoIterator<Item = (Exponents, Rational)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension n must be positive".to_string()));
        }
        let mut map: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (exp, val) in terms {
            let sum: u32 = exp.iter().sum();
            if sum != degree {
                return Err(Error::Shape(format!(
                    "exponents {exp:?} have degree {sum}, expected {degree}"
                )));
            }
            let slot = map.entry(exp).or_insert_with(Rational::zero);
            *slot = &*slot + &val;
        }
        map.retain(|_, v| !v.is_zero());
        Ok(ConformalSymbol {
            n,
            weights,
            degree,
            terms: map,
        })
    }

    /// The multiplication operator `φ ψ χ`.
    pub fn scalar(n: u32, weights: [Rational; 3]) -> Self {
        Self::new(n, weights, 0, [([0; 6], r(1))]).expect("degree zero")
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn coeff(&self, exp: &Exponents) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `μ = λ + γ + τ + 2k/n`.
    pub fn target_weight(&self) -> Rational {
        self.weight_sum() + q(2 * self.degree as i64, self.n as i64)
    }

    fn weight_sum(&self) -> Rational {
        &(&self.weights[0] + &self.weights[1]) + &self.weights[2]
    }

    pub fn to_document(&self) -> SymbolDocument {
        SymbolDocument {
            n: self.n,
            k: self.degree,
            weights: self.weights.iter().map(|w| w.to_string()).collect(),
            terms: self
                .terms
                .iter()
                .map(|(exp, val)| SymbolTerm {
                    exp: *exp,
                    val: val.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &SymbolDocument) -> Result<Self> {
        let weights: Vec<Rational> = doc
            .weights
            .iter()
            .map(|w| w.parse())
            .collect::<Result<_>>()?;
        let weights: [Rational; 3] = weights.try_into().map_err(|w: Vec<Rational>| {
            Error::Format(format!("expected 3 weights, got {}", w.len()))
        })?;
        let terms = doc
            .terms
            .iter()
            .map(|t| Ok((t.exp, t.val.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.n, weights, doc.k, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Wire format `{n, k, weights, terms: [{exp, val}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDocument {
    pub n: u32,
    pub k: u32,
    pub weights: Vec<String>,
    pub terms: Vec<SymbolTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub exp: Exponents,
    pub val: String,
}

/// Which covector multiplies a family of the defect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    X,
    Xi,
    Eta,
    Zeta,
}

impl Family {
    pub const COVECTORS: [Family; 3] = [Family::Xi, Family::Eta, Family::Zeta];
}

/// `L_{X̄_i} B = (·) x_i + (·) ξ_i + (·) η_i + (·) ζ_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectExpansion {
    pub x: BTreeMap<Exponents, Rational>,
    pub xi: BTreeMap<Exponents, Rational>,
    pub eta: BTreeMap<Exponents, Rational>,
    pub zeta: BTreeMap<Exponents, Rational>,
}

impl DefectExpansion {
    pub fn family(&self, f: Family) -> &BTreeMap<Exponents, Rational> {
        match f {
            Family::X => &self.x,
            Family::Xi => &self.xi,
            Family::Eta => &self.eta,
            Family::Zeta => &self.zeta,
        }
    }

    fn family_mut(&mut self, f: Family) -> &mut BTreeMap<Exponents, Rational> {
        match f {
            Family::X => &mut self.x,
            Family::Xi => &mut self.xi,
            Family::Eta => &mut self.eta,
            Family::Zeta => &mut self.zeta,
        }
    }

    fn push(&mut self, f: Family, exp: Option<Exponents>, val: Rational) {
        let Some(exp) = exp else { return };
        if val.is_zero() {
            return;
        }
        let map = self.family_mut(f);
        let slot = map.entry(exp).or_insert_with(Rational::zero);
        *slot = &*slot + &val;
        if slot.is_zero() {
            map.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_empty() && self.xi.is_empty() && self.eta.is_empty() && self.zeta.is_empty()
    }
}

/// `exp + delta`, or `None` if an entry would go negative.
fn shifted(exp: &Exponents, delta: [i32; 6]) -> Option<Exponents> {
    let mut out = [0u32; 6];
    for i in 0..6 {
        let v = exp[i] as i64 + delta[i] as i64;
        if v < 0 {
            return None;
        }
        out[i] = v as u32;
    }
    Some(out)
}

/// The action of the inversion generators on `B`, term by term.
pub fn conformal_defect(symbol: &ConformalSymbol) -> DefectExpansion {
    let n = r(symbol.n as i64);
    let [l, g, t] = &symbol.weights;
    let (nl, ng, nt) = (&n * l, &n * g, &n * t);
    let k = r(symbol.degree as i64);
    let excess = &symbol.target_weight() - &symbol.weight_sum();
    let x_factor = r(2) * (r(2) * &k - &n * &excess);
    let mut out = DefectExpansion::default();
    for (exp, alpha) in &symbol.terms {
        let [a, b, c, d, e, f] = exp.map(|v| r(v as i64));
        let one = r(1);
        let two = r(2);
        out.push(Family::X, Some(*exp), &x_factor * alpha);

        let fam = Family::Xi;
        let v = &two * &a * (&two * &a + &n * (&two * l - &one));
        out.push(fam, shifted(exp, [-1, 0, 0, 0, 0, 0]), v * alpha);
        let v = -(&b * (&b - &one));
        out.push(fam, shifted(exp, [0, -2, 0, 1, 0, 0]), v * alpha);
        let v = -(&two * &b * &c);
        out.push(fam, shifted(exp, [0, -1, -1, 0, 1, 0]), v * alpha);
        let v = &two * &b * (&b - &one + &e + &two * &d + &ng);
        out.push(fam, shifted(exp, [0, -1, 0, 0, 0, 0]), v * alpha);
        let v = -(&c * (&c - &one));
        out.push(fam, shifted(exp, [0, 0, -2, 0, 0, 1]), v * alpha);
        let v = &two * &c * (&c - &one + &e + &two * &f + &nt);
        out.push(fam, shifted(exp, [0, 0, -1, 0, 0, 0]), v * alpha);

        let fam = Family::Eta;
        let v = &two * &d * (&two * &d + &n * (&two * g - &one));
        out.push(fam, shifted(exp, [0, 0, 0, -1, 0, 0]), v * alpha);
        let v = -(&b * (&b - &one));
        out.push(fam, shifted(exp, [1, -2, 0, 0, 0, 0]), v * alpha);
        let v = -(&two * &b * &e);
        out.push(fam, shifted(exp, [0, -1, 1, 0, -1, 0]), v * alpha);
        let v = &two * &b * (&b - &one + &c + &two * &a + &nl);
        out.push(fam, shifted(exp, [0, -1, 0, 0, 0, 0]), v * alpha);
        let v = -(&e * (&e - &one));
        out.push(fam, shifted(exp, [0, 0, 0, 0, -2, 1]), v * alpha);
        let v = &two * &e * (&e - &one + &c + &two * &f + &nt);
        out.push(fam, shifted(exp, [0, 0, 0, 0, -1, 0]), v * alpha);

        let fam = Family::Zeta;
        let v = &two * &f * (&two * &f + &n * (&two * t - &one));
        out.push(fam, shifted(exp, [0, 0, 0, 0, 0, -1]), v * alpha);
        let v = -(&e * (&e - &one));
        out.push(fam, shifted(exp, [0, 0, 0, 1, -2, 0]), v * alpha);
        let v = -(&two * &e * &c);
        out.push(fam, shifted(exp, [0, 1, -1, 0, -1, 0]), v * alpha);
        let v = &two * &e * (&e - &one + &b + &two * &d + &ng);
        out.push(fam, shifted(exp, [0, 0, 0, 0, -1, 0]), v * alpha);
        let v = -(&c * (&c - &one));
        out.push(fam, shifted(exp, [1, 0, -2, 0, 0, 0]), v * alpha);
        let v = &two * &c * (&c - &one + &b + &two * &a + &nl);
        out.push(fam, shifted(exp, [0, 0, -1, 0, 0, 0]), v * alpha);
    }
    out
}

/// One recurrence equation: family, target monomial of degree `k - 1`, and
/// `(unknown exponents, coefficient)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeqRow {
    pub family: Family,
    pub target: Exponents,
    pub terms: Vec<(Exponents, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalSystem {
    pub n: u32,
    pub weights: [Rational; 3],
    pub degree: u32,
    pub unknowns: Vec<Exponents>,
    pub rows: Vec<NeqRow>,
}

impl ConformalSystem {
    pub fn linear_system(&self) -> LinearSystem<Rational> {
        let mut sys = LinearSystem::new(self.unknowns.len());
        for row in &self.rows {
            sys.push_row(row.terms.iter().map(|(exp, v)| {
                let col = self
                    .unknowns
                    .binary_search(exp)
                    .expect("exponent of degree k");
                (col, v.clone())
            }));
        }
        sys
    }
}

/// The three recurrence families, one row per family and per exponent tuple
/// of degree `k - 1`. Unknowns with a negative exponent are absent.
pub fn build_neqs(k: u32, n: u32, weights: [Rational; 3]) -> Result<ConformalSystem> {
    if k == 0 {
        return Err(Error::Precondition(
            "the recurrence needs k ≥ 1".to_string(),
        ));
    }
    if n == 0 {
        return Err(Error::Domain("dimension n must be positive".to_string()));
    }
    let nn = r(n as i64);
    let [l, g, t] = &weights;
    let (nl, ng, nt) = (&nn * l, &nn * g, &nn * t);
    let one = r(1);
    let two = r(2);
    let mut rows = Vec::new();
    for target in monomials(k - 1) {
        let [a, b, c, d, e, f] = target.map(|v| r(v as i64));
        let at = |delta: [i32; 6]| shifted(&target, delta);
        let mut family = |fam: Family, raw: Vec<(Option<Exponents>, Rational)>| {
            let mut terms: BTreeMap<Exponents, Rational> = BTreeMap::new();
            for (exp, v) in raw {
                if let Some(exp) = exp {
                    let slot = terms.entry(exp).or_insert_with(Rational::zero);
                    *slot = &*slot + &v;
                }
            }
            rows.push(NeqRow {
                family: fam,
                target,
                terms: terms.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            });
        };
        let a1 = &a + &one;
        let b1 = &b + &one;
        let b2 = &b + &two;
        let c1 = &c + &one;
        let c2 = &c + &two;
        let d1 = &d + &one;
        let e1 = &e + &one;
        let e2 = &e + &two;
        let f1 = &f + &one;
        family(
            Family::Xi,
            vec![
                (
                    at([1, 0, 0, 0, 0, 0]),
                    &two * &a1 * (&two * &a1 + &nn * (&two * l - &one)),
                ),
                (at([0, 2, 0, -1, 0, 0]), -(&b2 * &b1)),
                (at([0, 1, 1, 0, -1, 0]), -(&two * &b1 * &c1)),
                (
                    at([0, 1, 0, 0, 0, 0]),
                    &two * &b1 * (&b + &e + &two * &d + &ng),
                ),
                (at([0, 0, 2, 0, 0, -1]), -(&c2 * &c1)),
                (
                    at([0, 0, 1, 0, 0, 0]),
                    &two * &c1 * (&c + &e + &two * &f + &nt),
                ),
            ],
        );
        family(
            Family::Eta,
            vec![
                (
                    at([0, 0, 0, 1, 0, 0]),
                    &two * &d1 * (&two * &d1 + &nn * (&two * g - &one)),
                ),
                (at([-1, 2, 0, 0, 0, 0]), -(&b2 * &b1)),
                (at([0, 1, -1, 0, 1, 0]), -(&two * &b1 * &e1)),
                (
                    at([0, 1, 0, 0, 0, 0]),
                    &two * &b1 * (&b + &c + &two * &a + &nl),
                ),
                (at([0, 0, 0, 0, 2, -1]), -(&e2 * &e1)),
                (
                    at([0, 0, 0, 0, 1, 0]),
                    &two * &e1 * (&c + &e + &two * &f + &nt),
                ),
            ],
        );
        family(
            Family::Zeta,
            vec![
                (
                    at([0, 0, 0, 0, 0, 1]),
                    &two * &f1 * (&two * &f1 + &nn * (&two * t - &one)),
                ),
                (at([0, 0, 0, -1, 2, 0]), -(&e2 * &e1)),
                (at([0, -1, 1, 0, 1, 0]), -(&two * &e1 * &c1)),
                (
                    at([0, 0, 0, 0, 1, 0]),
                    &two * &e1 * (&b + &e + &two * &d + &ng),
                ),
                (at([-1, 0, 2, 0, 0, 0]), -(&c2 * &c1)),
                (
                    at([0, 0, 1, 0, 0, 0]),
                    &two * &c1 * (&c + &b + &two * &a + &nl),
                ),
            ],
        );
    }
    Ok(ConformalSystem {
        n,
        weights,
        degree: k,
        unknowns: monomials(k),
        rows,
    })
}

/// The displayed `k = 1` solution with parameters `(s, t, u)`.
pub fn b2_closed_form(
    n: u32,
    weights: [Rational; 3],
    s: Rational,
    t: Rational,
    u: Rational,
) -> Result<ConformalSymbol> {
    let nn = r(n as i64);
    let [l, g, ta] = &weights;
    let p = |w: &Rational| &r(2) + &(&nn * &(&(&r(2) * w) - &r(1)));
    let (pl, pg, pt) = (p(l), p(g), p(ta));
    let all = &(&pl * &pg) * &pt;
    let terms = [
        (
            [1, 0, 0, 0, 0, 0],
            &(&(&nn * &(&(g * &s) + &(ta * &t))) * &pg) * &pt,
        ),
        (
            [0, 0, 0, 1, 0, 0],
            &(&(&nn * &(&(l * &s) + &(ta * &u))) * &pl) * &pt,
        ),
        (
            [0, 0, 0, 0, 0, 1],
            &(&(&nn * &(&(g * &u) + &(l * &t))) * &pl) * &pg,
        ),
        ([0, 1, 0, 0, 0, 0], -(&all * &s)),
        ([0, 0, 1, 0, 0, 0], -(&all * &t)),
        ([0, 0, 0, 0, 1, 0], -(&all * &u)),
    ];
    ConformalSymbol::new(n, weights, 1, terms)
}

/// Basis of the invariant symbols of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalKernel {
    pub basis: Vec<ConformalSymbol>,
}

impl ConformalKernel {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, symbol: &ConformalSymbol) -> bool {
        let Some(first) = self.basis.first() else {
            return symbol.is_zero();
        };
        let unknowns = monomials(first.degree);
        let vec = |s: &ConformalSymbol| -> Vec<Rational> {
            unknowns.iter().map(|e| s.coeff(e)).collect()
        };
        let e = crate::linalg::Echelon::from_dense(
            unknowns.len(),
            self.basis.iter().map(vec).collect(),
        );
        e.contains(&vec(symbol))
    }
}

pub fn solve_b2k(k: u32, n: u32, weights: [Rational; 3]) -> Result<ConformalKernel> {
    if k == 0 {
        return Ok(ConformalKernel {
            basis: vec![ConformalSymbol::scalar(n, weights)],
        });
    }
    let sys = build_neqs(k, n, weights.clone())?;
    let basis = sys
        .linear_system()
        .nullspace()
        .into_iter()
        .map(|v| ConformalSymbol::new(n, weights.clone(), k, sys.unknowns.iter().copied().zip(v)))
        .collect::<Result<_>>()?;
    Ok(ConformalKernel { basis })
}

/// The divergence term of the action of a general vector field on `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// `μ - λ - γ - τ = 2k/n`.
    pub factor: Rational,
    /// `factor · α` for every term of `B`.
    pub products: BTreeMap<Exponents, Rational>,
    /// `B` is the zero symbol.
    pub degenerate: bool,
}

impl Obstruction {
    /// No term survives: `k = 0` or `B = 0`.
    pub fn passes(&self) -> bool {
        self.products.values().all(Rational::is_zero)
    }
}

/// Only the `Div(X)` term is computed; higher derivatives of `X` are not.
pub fn vectn_obstruction(symbol: &ConformalSymbol) -> Obstruction {
    let factor = &symbol.target_weight() - &symbol.weight_sum();
    Obstruction {
        products: symbol
            .terms
            .iter()
            .map(|(e, a)| (*e, &factor * a))
            .collect(),
        degenerate: symbol.is_zero(),
        factor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> [Rational; 3] {
        [q(a.0, a.1), q(b.0, b.1), q(c.0, c.1)]
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(0), vec![[0; 6]]);
        assert_eq!(monomials(1).len(), 6);
        assert_eq!(monomials(2).len(), 21);
        assert_eq!(monomials(3).len(), 56);
    }

    #[test]
    fn scalar_symbol_has_no_defect() {
        let s = ConformalSymbol::scalar(3, w((1, 2), (1, 3), (-1, 1)));
        assert!(conformal_defect(&s).is_zero());
        assert!(vectn_obstruction(&s).passes());
    }

    #[test]
    fn lone_xixi_term() {
        let weights = w((1, 3), (2, 1), (-1, 2));
        let n = 4;
        let s = ConformalSymbol::new(n, weights.clone(), 1, [([1, 0, 0, 0, 0, 0], r(1))]).unwrap();
        let d = conformal_defect(&s);
        // 2·1·(2 + n(2λ - 1))
        let expected = r(2) * (r(2) + r(4) * (q(2, 3) - r(1)));
        assert_eq!(d.xi.get(&[0; 6]), Some(&expected));
        assert!(d.x.is_empty());
    }

    #[test]
    fn closed_form_entries() {
        let b = b2_closed_form(2, w((1, 1), (1, 1), (1, 1)), r(1), r(0), r(0)).unwrap();
        assert_eq!(b.coeff(&[1, 0, 0, 0, 0, 0]), r(32));
        assert_eq!(b.coeff(&[0, 1, 0, 0, 0, 0]), r(-64));
        assert_eq!(b.target_weight(), r(4));
    }

    #[test]
    fn k1_kernel_has_dimension_three() {
        let k = solve_b2k(1, 2, w((1, 1), (1, 1), (1, 1))).unwrap();
        assert_eq!(k.dimension(), 3);
        let k = solve_b2k(1, 4, w((1, 2), (1, 3), (1, 5))).unwrap();
        assert_eq!(k.dimension(), 3);
        for (s, t, u) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
            let b = b2_closed_form(4, w((1, 2), (1, 3), (1, 5)), r(s), r(t), r(u)).unwrap();
            assert!(k.contains(&b));
            assert!(conformal_defect(&b).is_zero());
        }
    }

    #[test]
    fn order_zero_kernel_is_scalar() {
        let k = solve_b2k(0, 3, w((1, 1), (0, 1), (2, 1))).unwrap();
        assert_eq!(k.dimension(), 1);
        assert_eq!(k.basis[0].coeff(&[0; 6]), r(1));
    }

    #[test]
    fn obstruction_factor() {
        let b = b2_closed_form(4, w((1, 2), (1, 3), (1, 5)), r(1), r(2), r(3)).unwrap();
        let o = vectn_obstruction(&b);
        assert_eq!(o.factor, q(1, 2));
        assert!(!o.passes());
        let zero = ConformalSymbol::new(4, w((1, 2), (1, 3), (1, 5)), 2, []).unwrap();
        let o = vectn_obstruction(&zero);
        assert!(o.passes() && o.degenerate);
    }

    #[test]
    fn json_round_trip() {
        let b = b2_closed_form(3, w((1, 2), (-1, 3), (1, 5)), r(1), r(2), r(3)).unwrap();
        assert_eq!(ConformalSymbol::from_json(&b.to_json()).unwrap(), b);
        assert!(ConformalSymbol::from_json("{\"n\":1}").is_err());
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        assert!(ConformalSymbol::new(
            2,
            w((0, 1), (0, 1), (0, 1)),
            2,
            [([1, 0, 0, 0, 0, 0], r(1))]
        )
        .is_err());
        assert!(build_neqs(0, 2, w((0, 1), (0, 1), (0, 1))).is_err());
    }
}
