use serde::{Deserialize, Serialize};

use super::{ExponentVector, PolyError, SparsePoly};

/// Per-variable weight vectors in `Z_{>=0}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    weights: Vec<Vec<u64>>,
}

/// Degree of a polynomial under a grading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degree {
    /// The zero polynomial.
    Bottom,
    Homogeneous(Vec<u64>),
    Inhomogeneous,
}

impl Degree {
    pub fn homogeneous(&self) -> Option<&[u64]> {
        match self {
            Degree::Homogeneous(d) => Some(d),
            _ => None,
        }
    }
}

impl Grading {
    pub fn new(weights: Vec<Vec<u64>>) -> Result<Self, PolyError> {
        let m = weights.first().map(|w| w.len()).unwrap_or(1);
        if m == 0 {
            return Err(PolyError::Grading("weight vectors must have at least one component".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if w.len() != m {
                return Err(PolyError::Grading(format!("weight of variable {i} has {} components, expected {m}", w.len())));
            }
            if w.iter().all(|&c| c == 0) {
                return Err(PolyError::Grading(format!("weight of variable {i} is zero")));
            }
        }
        Ok(Grading { weights })
    }

    /// Every variable of weight 1.
    pub fn standard(n: usize) -> Self {
        Grading { weights: vec![vec![1]; n] }
    }

    /// Single-component grading from scalar weights.
    pub fn weighted(ws: &[u64]) -> Result<Self, PolyError> {
        Self::new(ws.iter().map(|&w| vec![w]).collect())
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// Number of grading components.
    pub fn components(&self) -> usize {
        self.weights.first().map(|w| w.len()).unwrap_or(1)
    }

    pub fn weights(&self) -> &[Vec<u64>] {
        &self.weights
    }

    /// Componentwise sum of the weights.
    pub fn mu(&self) -> Vec<u64> {
        let mut mu = vec![0; self.components()];
        for w in &self.weights {
            for (a, b) in mu.iter_mut().zip(w) {
                *a += b;
            }
        }
        mu
    }

    /// Sum of all components of all weights.
    pub fn total_mu(&self) -> u64 {
        self.mu().iter().sum()
    }

    /// Sum of the components of each variable's weight.
    pub fn total_weights(&self) -> Vec<u64> {
        self.weights.iter().map(|w| w.iter().sum()).collect()
    }

    pub fn is_standard(&self) -> bool {
        self.weights.iter().all(|w| w.len() == 1 && w[0] == 1)
    }

    pub fn monomial_degree(&self, e: &ExponentVector) -> Vec<u64> {
        let mut d = vec![0; self.components()];
        for (k, w) in e.as_slice().iter().zip(&self.weights) {
            for (a, b) in d.iter_mut().zip(w) {
                *a += *k as u64 * b;
            }
        }
        d
    }

    /// Total weighted degree of a monomial.
    pub fn monomial_total(&self, e: &ExponentVector) -> u64 {
        e.as_slice().iter().zip(&self.weights).map(|(k, w)| *k as u64 * w.iter().sum::<u64>()).sum()
    }

    pub fn degree(&self, a: &SparsePoly) -> Degree {
        let mut it = a.terms().iter();
        let Some((first, _)) = it.next() else {
            return Degree::Bottom;
        };
        let d = self.monomial_degree(first);
        if it.all(|(e, _)| self.monomial_degree(e) == d) {
            Degree::Homogeneous(d)
        } else {
            Degree::Inhomogeneous
        }
    }

    pub fn is_homogeneous(&self, a: &SparsePoly) -> bool {
        !matches!(self.degree(a), Degree::Inhomogeneous)
    }

    /// Total weighted degree of a homogeneous polynomial.
    pub fn total_degree(&self, a: &SparsePoly) -> Option<u64> {
        self.degree(a).homogeneous().map(|d| d.iter().sum())
    }

    /// All exponent vectors of total weighted degree `d`.
    pub fn monomials_of_total_degree(&self, d: u64) -> Vec<ExponentVector> {
        let tw = self.total_weights();
        let mut out = Vec::new();
        let mut cur = vec![0u32; tw.len()];
        fn rec(i: usize, left: u64, tw: &[u64], cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
            if i == tw.len() {
                if left == 0 {
                    out.push(ExponentVector::new(cur));
                }
                return;
            }
            let mut k = 0;
            while k * tw[i] <= left {
                cur[i] = k as u32;
                rec(i + 1, left - k * tw[i], tw, cur, out);
                k += 1;
            }
            cur[i] = 0;
        }
        rec(0, d, &tw, &mut cur, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{Modulus, VarSet};

    #[test]
    fn degree_examples() {
        let m = Modulus::field(2).unwrap();
        let v = VarSet::parse_list("x,y,z,w").unwrap();
        let g = Grading::weighted(&[1, 1, 1, 2]).unwrap();
        let f = v.parse_poly("w^2+x*y*z*(x)+xy^2z+xyz^2", m);
        assert!(f.is_err(), "parentheses are not part of the grammar");
        let f = v.parse_poly("w^2+x^2yz+xy^2z+xyz^2", m).unwrap();
        assert_eq!(g.degree(&f), Degree::Homogeneous(vec![4]));
        assert_eq!(g.mu(), vec![5]);

        let v3 = VarSet::parse_list("x,y,z").unwrap();
        let s = Grading::standard(3);
        assert_eq!(s.degree(&v3.parse_poly("x^3+y^3+z^3", m).unwrap()), Degree::Homogeneous(vec![3]));
        assert_eq!(s.degree(&v3.parse_poly("x+y^2", m).unwrap()), Degree::Inhomogeneous);
        assert_eq!(s.degree(&SparsePoly::zero(m, 3)), Degree::Bottom);
    }

    #[test]
    fn multigrading() {
        let g = Grading::new(vec![vec![1, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.mu(), vec![2, 1]);
        assert_eq!(g.total_mu(), 3);
        assert!(Grading::new(vec![vec![1, 0], vec![0, 0]]).is_err());
        assert!(Grading::new(vec![vec![1, 0], vec![1]]).is_err());
    }

    #[test]
    fn monomial_enumeration() {
        let g = Grading::weighted(&[1, 1, 1, 2]).unwrap();
        let ms = g.monomials_of_total_degree(2);
        assert_eq!(ms.len(), 7);
        assert!(ms.iter().all(|e| g.monomial_total(e) == 2));
        assert_eq!(Grading::standard(4).monomials_of_total_degree(8).len(), 165);
    }
}
