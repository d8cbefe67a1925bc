use serde::Serialize;

use crate::error::{Error, Result};

/// The golden ratio `(sqrt(5) + 1) / 2`, the hard-thresholding constant.
pub const ETA: f64 = 1.618_033_988_749_895;

fn check_k_gamma(k: usize, gamma: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("sparsity k must be at least 1"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    Ok(())
}

/// `1 + sqrt(1 + k gamma^2)`.
fn phi(k: usize, gamma: f64) -> f64 {
    1.0 + (1.0 + k as f64 * gamma * gamma).sqrt()
}

/// RIC level below which the DOMP contraction factor is under one:
/// `1 / sqrt(1 + (1 + sqrt(1 + k gamma^2))^2)`.
pub fn domp_ric_bound(k: usize, gamma: f64) -> Result<f64> {
    check_k_gamma(k, gamma)?;
    let f = phi(k, gamma);
    Ok(1.0 / (1.0 + f * f).sqrt())
}

/// RIC level below which the EDOMP contraction factor is under one:
/// `2 / (sqrt(4 + eta^2 phi^2) + eta phi)`.
pub fn edomp_ric_bound(k: usize, gamma: f64) -> Result<f64> {
    check_k_gamma(k, gamma)?;
    let ef = ETA * phi(k, gamma);
    Ok(2.0 / ((4.0 + ef * ef).sqrt() + ef))
}

/// `1 + r + ... + r^(k-1)`; equals `k` at `r = 1`.
fn geometric_sum(r: f64, k: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..k {
        sum += term;
        term *= r;
    }
    sum
}

/// Inputs to [`BoundConstants::compute`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    /// RIC of order `ck`.
    pub delta: f64,
    /// RIC of order `k`; defaults to `delta`, which can only loosen the bound.
    pub delta_k: Option<f64>,
    /// RIC of order `2k`; defaults to `delta`.
    pub delta_2k: Option<f64>,
    pub k: usize,
    pub gamma: f64,
    /// Penalty of the approximation problem; may be infinite.
    pub sigma: f64,
    /// Spectral norm of the matrix.
    pub a_norm: f64,
    /// The worst best-fit residual of the instance.
    pub theta: f64,
}

impl BoundInputs {
    pub fn new(delta: f64, k: usize, gamma: f64) -> Self {
        BoundInputs {
            delta,
            delta_k: None,
            delta_2k: None,
            k,
            gamma,
            sigma: f64::INFINITY,
            a_norm: 0.0,
            theta: 0.0,
        }
    }

    pub fn with_lower_orders(mut self, delta_k: f64, delta_2k: f64) -> Self {
        self.delta_k = Some(delta_k);
        self.delta_2k = Some(delta_2k);
        self
    }

    pub fn with_penalty(mut self, sigma: f64, a_norm: f64, theta: f64) -> Self {
        self.sigma = sigma;
        self.a_norm = a_norm;
        self.theta = theta;
        self
    }
}

/// Constants of the DOMP and EDOMP error bounds.
///
/// Starred fields belong to the EDOMP bound and equal the unstarred ones
/// scaled by `eta / sqrt(1 - delta^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub inputs: BoundInputs,
    pub phi: f64,
    pub eta: f64,
    pub beta: f64,
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
    pub tau: f64,
    pub beta_star: f64,
    pub rho_star: f64,
    pub c1_star: f64,
    pub c2_star: f64,
    pub zeta: f64,
    pub tau_star: f64,
    /// Proximity constant `C` of the approximation problem.
    pub proximity: f64,
    pub epsilon: f64,
    pub epsilon_star: f64,
    pub beta_below_one: bool,
    pub beta_star_below_one: bool,
}

fn check_ric(name: &str, d: f64) -> Result<()> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::invalid(format!(
            "{name} must lie in [0, 1), got {d}"
        )));
    }
    Ok(())
}

impl BoundConstants {
    pub fn compute(inputs: &BoundInputs) -> Result<Self> {
        let BoundInputs {
            delta: d,
            k,
            gamma,
            sigma,
            a_norm,
            theta,
            ..
        } = *inputs;
        check_k_gamma(k, gamma)?;
        check_ric("delta", d)?;
        let dk = inputs.delta_k.unwrap_or(d);
        let d2k = inputs.delta_2k.unwrap_or(d);
        check_ric("delta_k", dk)?;
        check_ric("delta_2k", d2k)?;
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::invalid("penalty sigma must be positive"));
        }
        if !(a_norm >= 0.0 && a_norm.is_finite() && theta >= 0.0 && theta.is_finite()) {
            return Err(Error::invalid(
                "matrix norm and theta must be finite and >= 0",
            ));
        }

        let phi = phi(k, gamma);
        let one_minus_sq = (1.0 - d * d).sqrt();
        let beta = phi * d / one_minus_sq;
        let rho = ((1.0 + d) / (1.0 - d)).sqrt();
        let c1 = 2.0 / (1.0 - d).sqrt();
        let c2 = phi * (1.0 + dk).sqrt() / one_minus_sq + (1.0 + d).sqrt() / (1.0 - d);
        let tau = if beta < 1.0 {
            c1 * geometric_sum(rho, k) + c2 / (1.0 - beta)
        } else {
            f64::INFINITY
        };

        let scale = ETA / one_minus_sq;
        let (beta_star, rho_star, c1_star, c2_star) =
            (scale * beta, scale * rho, scale * c1, scale * c2);
        let zeta = (1.0 + dk).sqrt() / (1.0 - d2k);
        let tau_star = if beta_star < 1.0 {
            (c1_star + zeta) * geometric_sum(rho_star, k) + (c2_star + zeta) / (1.0 - beta_star)
        } else {
            f64::INFINITY
        };

        let inv_root = 1.0 / sigma.sqrt();
        let proximity =
            (2.0 * a_norm * inv_root + a_norm * a_norm / sigma).sqrt() + a_norm * inv_root;
        let epsilon = theta * proximity / (1.0 - d).sqrt();

        Ok(BoundConstants {
            inputs: *inputs,
            phi,
            eta: ETA,
            beta,
            rho,
            c1,
            c2,
            tau,
            beta_star,
            rho_star,
            c1_star,
            c2_star,
            zeta,
            tau_star,
            proximity,
            epsilon,
            epsilon_star: scale * epsilon,
            beta_below_one: beta < 1.0,
            beta_star_below_one: beta_star < 1.0,
        })
    }

    /// `beta^p (rho / beta)^k`, evaluated as `rho^k beta^(p - k)` so that
    /// `beta = 0` gives `inf` for `p < k` rather than `NaN`.
    pub fn domp_leading_factor(&self, p: usize) -> f64 {
        leading(self.rho, self.beta, self.inputs.k, p)
    }

    /// `(beta*)^p (rho / beta)^k`; note `rho / beta = rho* / beta*`.
    pub fn edomp_leading_factor(&self, p: usize) -> f64 {
        leading(self.rho_star, self.beta_star, self.inputs.k, p)
    }

    /// Right-hand side of the DOMP bound on `||x^(p+1) - x_S||_2`.
    pub fn domp_error_bound(
        &self,
        p: usize,
        initial_error: f64,
        nu_norm: f64,
        with_epsilon: bool,
    ) -> f64 {
        let eps = if with_epsilon {
            self.epsilon / (1.0 - self.beta)
        } else {
            0.0
        };
        self.domp_leading_factor(p) * initial_error + self.tau * nu_norm + eps
    }

    /// Right-hand side of the EDOMP bound on `||x^(p+1) - x_S||_2`.
    pub fn edomp_error_bound(
        &self,
        p: usize,
        initial_error: f64,
        nu_norm: f64,
        with_epsilon: bool,
    ) -> f64 {
        let eps = if with_epsilon {
            self.epsilon_star / (1.0 - self.beta_star)
        } else {
            0.0
        };
        self.edomp_leading_factor(p) * initial_error + self.tau_star * nu_norm + eps
    }
}

fn leading(rho: f64, beta: f64, k: usize, p: usize) -> f64 {
    let exp = p as i64 - k as i64;
    let exp = exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    rho.powi(k as i32) * beta.powi(exp)
}

/// Convenience wrapper with `delta_k = delta_2k = delta`.
pub fn bound_constants(
    delta: f64,
    k: usize,
    gamma: f64,
    sigma: f64,
    a_norm: f64,
    theta: f64,
) -> Result<BoundConstants> {
    BoundConstants::compute(&BoundInputs::new(delta, k, gamma).with_penalty(sigma, a_norm, theta))
}
