//! Trigonometric identities used when reducing the constraints and the
//! kinetic energy. Each is evaluated from both sides.

use serde::Serialize;

use crate::model::coeffs::Angles;

/// Maximum absolute residuals of each identity over all index values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `sin(sum_{j<=i} alpha_j)` expanded as a sum of products, `i = 1..=n`.
    pub sin_expansion: f64,
    /// Telescoping sum of the `A_k` numerators, `j = 1..=n`.
    pub telescoping_sum: f64,
    /// Sum of squared partial chains `sum_i |sum_{j<=i} T_j e^{i theta_j}|^2`,
    /// with the entries of `alpha` playing the role of the headings.
    pub chain_norms: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.sin_expansion.max(self.telescoping_sum).max(self.chain_norms)
    }
}

/// Evaluates both sides of each identity. `weights` pairs with `alpha`
/// elementwise for the chain identity; extra entries on either side are
/// ignored there.
pub fn identity_check(weights: &[f64], alpha: &[f64]) -> IdentityResiduals {
    let ang = Angles::new(alpha);
    let n = alpha.len() as isize;

    let mut sin_expansion: f64 = 0.0;
    let mut telescoping_sum: f64 = 0.0;
    for i in 1..=n {
        let lhs = alpha[..i as usize].iter().sum::<f64>().sin();
        let rhs = Angles::sum(1, i, |j| {
            let tail: f64 = alpha[j..i as usize].iter().sum();
            tail.cos() * ang.cos_product(1, j as isize - 1) * ang.sin(j)
        });
        sin_expansion = sin_expansion.max((lhs - rhs).abs());

        let lhs = Angles::sum(1, i, |l| {
            let l = l as isize;
            let prev = (l - 1) as usize;
            ang.cos_product(1, l - 2) * (ang.sin(prev) - ang.cos(prev) * ang.sin(l as usize))
        });
        let rhs = -ang.cos_product(1, i - 1) * ang.sin(i as usize);
        telescoping_sum = telescoping_sum.max((lhs - rhs).abs());
    }

    let m = weights.len().min(alpha.len());
    let (t, th) = (&weights[..m], &alpha[..m]);
    let lhs: f64 = (1..=m)
        .map(|i| {
            let cx: f64 = (0..i).map(|j| t[j] * th[j].cos()).sum();
            let cy: f64 = (0..i).map(|j| t[j] * th[j].sin()).sum();
            cx * cx + cy * cy
        })
        .sum();
    let mut rhs = 0.0;
    for j in 1..=m {
        let w = (m + 1 - j) as f64;
        rhs += w * t[j - 1] * t[j - 1];
    }
    for k in 1..=m {
        for j in k + 1..=m {
            let w = 2.0 * (m + 1 - j) as f64;
            rhs += w * t[k - 1] * t[j - 1] * (th[k - 1] - th[j - 1]).cos();
        }
    }
    let chain_norms = (lhs - rhs).abs();

    IdentityResiduals {
        sin_expansion,
        telescoping_sum,
        chain_norms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_angles_give_zero_residuals() {
        let r = identity_check(&[1.0, 2.0, 3.0], &[0.0; 3]);
        assert_eq!(r.sin_expansion, 0.0);
        assert_eq!(r.telescoping_sum, 0.0);
    }

    #[test]
    fn single_angle_is_trivial() {
        let r = identity_check(&[0.5], &[1.234]);
        assert_eq!(r.sin_expansion, 0.0);
        assert!(r.max() < 1e-15);
    }
}
