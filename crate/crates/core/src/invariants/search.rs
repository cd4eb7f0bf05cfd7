use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::apply_operator_poly;
use crate::error::{Error, Result};
use crate::lie::StructureConstants;
use crate::linalg::{RowEchelon, SparseRow};
use crate::poly::{Monomial, Polynomial};

/// Largest ansatz (number of unknown coefficients) the search will build.
pub const MONOMIAL_CAP: usize = 20_000;

/// Reduced basis of a space of polynomial invariants. Every element has a
/// distinct leading monomial with coefficient 1 that occurs in no other
/// element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBasis {
    nvars: usize,
    elements: Vec<Polynomial>,
}

impl InvariantBasis {
    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Remainder of `p` after eliminating every leading monomial of the basis.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut r = p.clone();
        for b in &self.elements {
            let (lead, _) = b.leading_term().expect("basis elements are nonzero");
            let c = r.coeff(lead);
            if !c.is_zero() {
                r = &r - &b.scale(&c);
            }
        }
        r
    }

    /// Exact membership in the span.
    pub fn contains(&self, p: &Polynomial) -> bool {
        p.nvars() == self.nvars && self.reduce(p).is_zero()
    }
}

/// Basis of the polynomial invariants of degree `1..=max_degree`.
///
/// The ansatz `F = sum c_m m` over all monomials of those degrees is
/// annihilated by every operator iff its coefficients solve a homogeneous
/// linear system; operators preserve degree, so each degree is solved on its
/// own. The basis is fully reduced, ordered by degree and, within a degree,
/// by decreasing leading monomial.
pub fn polynomial_invariant_search(sc: &StructureConstants, max_degree: u32) -> Result<InvariantBasis> {
    if max_degree == 0 {
        return Err(Error::Invalid("max_degree must be at least 1".into()));
    }
    let n = sc.dim();
    let count: usize = (1..=max_degree)
        .map(|d| Monomial::count_of_degree(n, d))
        .fold(0usize, |a, b| a.saturating_add(b));
    if count > MONOMIAL_CAP {
        return Err(Error::AnsatzCap {
            count,
            cap: MONOMIAL_CAP,
        });
    }
    let m = sc.coadjoint_matrix();
    let mut elements = Vec::new();
    for degree in 1..=max_degree {
        let monomials = Monomial::all_of_degree(n, degree);
        let mut rows: BTreeMap<(usize, Monomial), SparseRow> = BTreeMap::new();
        for (col, mono) in monomials.iter().enumerate() {
            let p = Polynomial::from_terms(n, [(mono.clone(), BigRational::from_integer(1.into()))]);
            for i in 1..=n {
                for (t, c) in apply_operator_poly(&m, i, &p).terms() {
                    rows.entry((i, t.clone())).or_default().push((col, c.clone()));
                }
            }
        }
        let mut ech = RowEchelon::new(monomials.len());
        for row in rows.into_values() {
            if ech.rank() == monomials.len() {
                break;
            }
            ech.insert(row);
        }
        let kernel = ech.nullspace();
        // Re-reduce the kernel so that leading monomials are pivots.
        let mut canon = RowEchelon::new(monomials.len());
        for v in &kernel {
            canon.insert(
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(c, x)| (c, x.clone()))
                    .collect(),
            );
        }
        for (_, row) in canon.into_rref() {
            elements.push(Polynomial::from_terms(
                n,
                row.into_iter().map(|(c, x)| (monomials[c].clone(), x)),
            ));
        }
    }
    Ok(InvariantBasis { nvars: n, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::invariants::is_invariant_symbolic;
    use crate::rational::rat;

    fn poly(text: &str, n: usize) -> Polynomial {
        parse(text, n, &Default::default()).unwrap().as_polynomial(n).unwrap()
    }

    fn sl2() -> StructureConstants {
        StructureConstants::new(3)
            .with(1, 2, 2, rat(2))
            .unwrap()
            .with(1, 3, 3, rat(-2))
            .unwrap()
            .with(2, 3, 1, rat(1))
            .unwrap()
    }

    #[test]
    fn abelian_linear_invariants() {
        let b = polynomial_invariant_search(&StructureConstants::abelian(2), 1).unwrap();
        assert_eq!(b.elements(), &[poly("x1", 2), poly("x2", 2)]);
    }

    #[test]
    fn sl2_casimir() {
        let b = polynomial_invariant_search(&sl2(), 2).unwrap();
        assert_eq!(b.elements(), &[poly("x1^2 + 4*x2*x3", 3)]);
        assert!(polynomial_invariant_search(&sl2(), 1).unwrap().is_empty());
        for p in b.elements() {
            assert!(is_invariant_symbolic(&sl2(), p));
        }
    }

    #[test]
    fn membership_by_reduction() {
        let b = polynomial_invariant_search(&StructureConstants::abelian(2), 2).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.contains(&poly("3*x1*x2 - x2^2 + 7*x1", 2)));
        assert!(!b.contains(&poly("x1 + 1", 2)));
    }

    #[test]
    fn zero_degree_and_cap() {
        assert!(polynomial_invariant_search(&sl2(), 0).is_err());
        let big = StructureConstants::abelian(30);
        assert!(matches!(
            polynomial_invariant_search(&big, 4),
            Err(Error::AnsatzCap { .. })
        ));
    }
}
