//! Numeric family scan: every `F_p` value of the placeholder coefficients.

use qfsplit::polyring::{ExponentVector, Grading, Modulus, SparsePoly, VarSet};
use qfsplit::qfs_cy::{cy_height, CyVerdict};
use rayon::prelude::*;
use serde::Serialize;

/// At most `p^12` members.
pub const MAX_PLACEHOLDERS: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error("{0} placeholders exceed the limit of {MAX_PLACEHOLDERS}")]
    Guard(usize),
    #[error("placeholder {0:?} is also a variable")]
    Clash(String),
    #[error("p = {0} is not prime")]
    Modulus(u64),
    #[error("{0}")]
    Parse(String),
    #[error("weights: {0}")]
    Weights(String),
    #[error("start index {start} is past the end ({total} members)")]
    Start { start: u64, total: u64 },
}

/// A polynomial in `vars` whose coefficients are polynomials in `params`.
#[derive(Clone, Debug)]
pub struct Template {
    pub vars: VarSet,
    pub params: Vec<String>,
    pub grading: Grading,
    modulus: Modulus,
    /// Parsed over `vars ++ params`.
    joint: SparsePoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanOutcome {
    Height {
        verdict: CyVerdict,
    },
    /// The assignment makes the polynomial vanish.
    Zero,
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub index: u64,
    pub assignment: Vec<(String, u64)>,
    pub poly: String,
    pub outcome: ScanOutcome,
}

impl ScanRow {
    /// `Some(None)` for height ∞, `Some(Some(n))` for a finite height.
    pub fn height(&self) -> Option<Option<u32>> {
        match &self.outcome {
            ScanOutcome::Height { verdict: CyVerdict::Finite { height } } => Some(Some(*height)),
            ScanOutcome::Height { verdict: CyVerdict::Infinite { .. } } => Some(None),
            _ => None,
        }
    }
}

impl Template {
    pub fn new(p: u64, vars: &[String], weights: Option<&[Vec<u64>]>, params: &[String], text: &str) -> Result<Self, ScanError> {
        if params.len() > MAX_PLACEHOLDERS {
            return Err(ScanError::Guard(params.len()));
        }
        if let Some(c) = params.iter().find(|c| vars.contains(c)) {
            return Err(ScanError::Clash(c.clone()));
        }
        let modulus = Modulus::field(p).map_err(|_| ScanError::Modulus(p))?;
        let joint_vars: Vec<String> = vars.iter().chain(params).cloned().collect();
        let all = VarSet::new(&joint_vars).map_err(|e| ScanError::Parse(e.to_string()))?;
        let joint = all.parse_poly(text, modulus).map_err(|e| ScanError::Parse(e.to_string()))?;
        let vars = VarSet::new(vars).map_err(|e| ScanError::Parse(e.to_string()))?;
        let grading = match weights {
            None => Grading::standard(vars.len()),
            Some(rows) => {
                if rows.iter().any(|r| r.len() != vars.len()) {
                    return Err(ScanError::Weights(format!("each row needs {} entries", vars.len())));
                }
                Grading::new((0..vars.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect())
                    .map_err(|e| ScanError::Weights(e.to_string()))?
            }
        };
        Ok(Template { vars, params: params.to_vec(), grading, modulus, joint })
    }

    /// `p^{#params}`.
    pub fn size(&self) -> u64 {
        self.modulus.p().pow(self.params.len() as u32)
    }

    /// Values of the member with this index; the first placeholder is the
    /// most significant base-`p` digit.
    pub fn assignment(&self, index: u64) -> Vec<u64> {
        let p = self.modulus.p();
        let k = self.params.len();
        (0..k).map(|i| (index / p.pow((k - 1 - i) as u32)) % p).collect()
    }

    pub fn specialize(&self, values: &[u64]) -> SparsePoly {
        let n = self.vars.len();
        let m = self.modulus;
        let terms = self.joint.terms().iter().map(|(e, c)| {
            let e = e.as_slice();
            let coeff = values.iter().zip(&e[n..]).fold(*c, |acc, (&v, &k)| m.mul(acc, m.pow(v, k as u64)));
            (ExponentVector::new(&e[..n]), coeff)
        });
        SparsePoly::from_terms(m, n, terms.collect::<Vec<_>>())
    }

    pub fn member(&self, index: u64, max_iter: Option<u32>) -> ScanRow {
        let values = self.assignment(index);
        let f = self.specialize(&values);
        let outcome = if f.is_zero() {
            ScanOutcome::Zero
        } else {
            match cy_height(&f, &self.grading, max_iter) {
                Ok(r) => ScanOutcome::Height { verdict: r.verdict },
                Err(e) => ScanOutcome::Error { message: e.to_string() },
            }
        };
        ScanRow { index, assignment: self.params.iter().cloned().zip(values).collect(), poly: self.vars.format(&f), outcome }
    }

    /// Members `start..`, in index order, handed to `sink` in batches. The
    /// members of a batch are computed in parallel on `pool`.
    pub fn run<F: FnMut(&ScanRow)>(
        &self,
        pool: &rayon::ThreadPool,
        start: u64,
        limit: Option<u64>,
        max_iter: Option<u32>,
        mut sink: F,
    ) -> Result<(), ScanError> {
        let total = self.size();
        if start > total {
            return Err(ScanError::Start { start, total });
        }
        let end = limit.map_or(total, |l| total.min(start.saturating_add(l)));
        let batch = 16 * pool.current_num_threads() as u64;
        let mut lo = start;
        while lo < end {
            let hi = end.min(lo + batch);
            let rows: Vec<ScanRow> = pool.install(|| (lo..hi).into_par_iter().map(|i| self.member(i, max_iter)).collect());
            rows.iter().for_each(&mut sink);
            lo = hi;
        }
        Ok(())
    }
}

/// `"2,3,inf"`; `None` stands for ∞.
pub fn parse_targets(s: &str) -> Result<Vec<Option<u32>>, ScanError> {
    s.split(',')
        .map(|t| match t.trim() {
            "inf" | "∞" => Ok(None),
            t => t.parse::<u32>().map(Some).map_err(|_| ScanError::Parse(format!("bad target height {t:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool() -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap()
    }

    fn names(s: &str) -> Vec<String> {
        s.split(',').map(String::from).collect()
    }

    #[test]
    fn cubic_pencil() {
        let t = Template::new(2, &names("x,y,z"), None, &names("c"), "x^3+y^3+z^3+c*x*y*z").unwrap();
        let mut rows = Vec::new();
        t.run(&pool(), 0, None, None, |r| rows.push(r.clone())).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].height(), Some(Some(2)));
        assert_eq!(rows[1].height(), Some(Some(1)));
    }

    #[test]
    fn ordering_and_resume() {
        let t = Template::new(3, &names("x,y,z"), None, &names("a,b"), "a*x^3+b*y^3+z^3").unwrap();
        assert_eq!(t.size(), 9);
        assert_eq!(t.assignment(5), vec![1, 2]);
        let mut all = Vec::new();
        t.run(&pool(), 0, None, Some(8), |r| all.push(r.index)).unwrap();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
        let mut tail = Vec::new();
        t.run(&pool(), 4, Some(3), Some(8), |r| tail.push(r.index)).unwrap();
        assert_eq!(tail, vec![4, 5, 6]);
        assert!(t.run(&pool(), 10, None, None, |_| ()).is_err());
    }

    #[test]
    fn zero_member_is_rejected() {
        let t = Template::new(2, &names("x,y"), None, &names("a,b"), "a*x^2+b*y^2").unwrap();
        assert_eq!(t.member(0, None).outcome, ScanOutcome::Zero);
        assert!(matches!(t.member(1, None).outcome, ScanOutcome::Height { .. }));
    }

    #[test]
    fn guards() {
        let many: Vec<String> = (0..13).map(|i| format!("c{i}")).collect();
        assert!(matches!(Template::new(2, &names("x"), None, &many, "x"), Err(ScanError::Guard(13))));
        assert!(matches!(Template::new(2, &names("x,c"), None, &names("c"), "x"), Err(ScanError::Clash(_))));
        assert_eq!(parse_targets("2, inf").unwrap(), vec![Some(2), None]);
    }
}
