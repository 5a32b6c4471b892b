use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::binomial;

/// Principal-curvature tuple `(κ_1, …, κ_n)` with `n >= 2` finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct KappaVector(Vec<f64>);

impl KappaVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidKappa(format!(
                "dimension must be at least 2, got {}",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidKappa(format!("entry {} is not finite", i + 1)));
        }
        Ok(KappaVector(entries))
    }

    /// Umbilic point `(x, …, x)`.
    pub fn umbilic(n: usize, x: f64) -> Result<Self> {
        Self::new(vec![x; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> KappaVector {
        KappaVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for KappaVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        KappaVector::new(v)
    }
}

impl From<KappaVector> for Vec<f64> {
    fn from(k: KappaVector) -> Self {
        k.0
    }
}

impl std::ops::Index<usize> for KappaVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// All elementary symmetric polynomials `e_0..=e_n` of `x`, via the
/// recurrence `e_k(x_1..x_m) = e_k(x_1..x_{m-1}) + x_m e_{k-1}(x_1..x_{m-1})`.
pub fn elementary_symmetric(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &xm) in x.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += xm * e[k - 1];
        }
    }
    e
}

fn elementary_symmetric_skip(x: &[f64], skip: usize) -> Vec<f64> {
    let n = x.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    let mut m = 0;
    for (j, &xj) in x.iter().enumerate() {
        if j == skip {
            continue;
        }
        m += 1;
        for k in (1..=m).rev() {
            e[k] += xj * e[k - 1];
        }
    }
    e
}

/// `σ_k(κ)`; `σ_0 = 1` and `σ_k = 0` for `k > n`.
pub fn sigma_k(kappa: &KappaVector, k: usize) -> f64 {
    if k > kappa.n() {
        return 0.0;
    }
    elementary_symmetric(kappa.as_slice())[k]
}

/// `σ_k(κ|i)`: `σ_k` with `κ_i` set to zero. `i` is 0-based.
pub fn sigma_k_omit(kappa: &KappaVector, k: usize, i: usize) -> Result<f64> {
    let n = kappa.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if k > n {
        return Ok(0.0);
    }
    Ok(elementary_symmetric_skip(kappa.as_slice(), i)[k])
}

/// `σ_k(κ|i)` for every `i`, indexed `[i][k]`.
pub(crate) fn sigma_omit_table(x: &[f64]) -> Vec<Vec<f64>> {
    (0..x.len()).map(|i| elementary_symmetric_skip(x, i)).collect()
}

/// Normalized `k`-th mean curvature `H_k = σ_k / C(n, k)`.
pub fn hk(kappa: &KappaVector, k: usize) -> Result<f64> {
    let n = kappa.n();
    if k > n {
        return Err(Error::OrderOutOfRange { k, n });
    }
    Ok(sigma_k(kappa, k) / binomial(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(x: &[f64]) -> KappaVector {
        KappaVector::new(x.to_vec()).unwrap()
    }

    /// Expansion over all k-subsets, used as an independent oracle.
    fn sigma_brute(x: &[f64], k: usize) -> f64 {
        let n = x.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|j| m & (1 << j) != 0).map(|j| x[j]).product::<f64>())
            .sum()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_k(&kv(&[1.0, 1.0, 1.0]), 2), 3.0);
        assert_eq!(sigma_k(&kv(&[-0.5, 1.0, 1.5]), 2), 0.25);
        assert_eq!(sigma_k(&kv(&[2.0, 3.0]), 3), 0.0);
        assert_eq!(sigma_k(&kv(&[2.0, 3.0]), 0), 1.0);
    }

    #[test]
    fn sigma_matches_subset_expansion() {
        let x = [0.3, -1.2, 2.5, 0.7, -0.4, 1.9];
        for k in 0..=6 {
            let a = sigma_k(&kv(&x), k);
            let b = sigma_brute(&x, k);
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn sigma_omit_examples() {
        let k = kv(&[-0.5, 1.0, 1.5]);
        assert_eq!(sigma_k_omit(&k, 2, 2).unwrap(), -0.5);
        assert_eq!(sigma_k_omit(&kv(&[1.0, 1.0, 1.0]), 1, 0).unwrap(), 2.0);
        assert_eq!(sigma_k_omit(&k, 0, 1).unwrap(), 1.0);
        assert!(matches!(
            sigma_k_omit(&k, 1, 3),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn hk_examples() {
        for n in 2..=6 {
            for k in 0..=n {
                assert!((hk(&KappaVector::umbilic(n, 1.0).unwrap(), k).unwrap() - 1.0).abs() < 1e-15);
            }
        }
        assert!((hk(&kv(&[-0.5, 1.0, 1.5]), 2).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(hk(&kv(&[2.0, 2.0]), 2).unwrap(), 4.0);
        assert!(hk(&kv(&[2.0, 2.0]), 3).is_err());
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(KappaVector::new(vec![1.0]).is_err());
        assert!(KappaVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(KappaVector::new(vec![1.0, f64::INFINITY]).is_err());
    }
}
