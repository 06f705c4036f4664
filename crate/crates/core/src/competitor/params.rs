use crate::error::{Error, Result};

/// Radii, scales and thresholds of the gluing construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GlueParams {
    /// `B1 = B(0, r1)` holds the region where `F` differs from `E`.
    pub r1: f64,
    /// `B2 = B(0, r2)` must contain the outer dilate `D2`.
    pub r2: f64,
    pub m0: i32,
    pub m2: i32,
    /// Scale of the welding complexes.
    pub m3: i32,
    pub eps1: f64,
    /// Dilation margin of `D1`, `D2`; a multiple of `2^-m2`.
    pub eps2: f64,
    pub t1: f64,
    /// Shell half-width of the welding complexes.
    pub tau: f64,
    /// Indices of the sequence members to glue (all members when empty).
    pub ks: Vec<u64>,
    pub slice_samples: usize,
    /// Scale of the certificate complexes (defaults to `m0`).
    pub cert_scale: Option<i32>,
    pub seed: u64,
    /// Absolute tolerance for measured (in)equalities.
    pub tol: f64,
}

impl GlueParams {
    /// Checks the standing inequalities between the parameters.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        if !(self.r1 > 0.0 && self.r2 > self.r1) {
            return fail(format!("need 0 < r1 < r2, got r1 = {}, r2 = {}", self.r1, self.r2));
        }
        let h0 = 2f64.powi(-self.m0);
        if h0 >= (self.r2 - self.r1) / 100.0 {
            return fail(format!("2^-m0 = {h0} must be below (r2 - r1)/100"));
        }
        if !(self.eps1 > 0.0 && self.eps2 > 0.0 && self.eps2 < self.eps1) {
            return fail(format!("need 0 < eps2 < eps1, got eps1 = {}, eps2 = {}", self.eps1, self.eps2));
        }
        if self.m2 < 0 || (self.eps2 * 2f64.powi(self.m2)).fract() != 0.0 {
            return fail(format!("eps2 = {} is not a multiple of 2^-{}", self.eps2, self.m2));
        }
        if !(self.t1 > 0.0 && self.t1 < 1e-2 * self.eps1) {
            return fail(format!("t1 = {} must lie in (0, 1e-2 * eps1)", self.t1));
        }
        let cap = (2f64.powi(-10) * self.eps2).min(0.5 * self.t1);
        if !(self.tau > 0.0 && self.tau < cap) {
            return fail(format!("tau = {} must lie in (0, {cap})", self.tau));
        }
        if self.m3 <= self.m0 + self.m2 {
            return fail(format!("m3 = {} must exceed m0 + m2 = {}", self.m3, self.m0 + self.m2));
        }
        if self.ks.windows(2).any(|w| w[0] >= w[1]) {
            return fail("k values must be strictly increasing".into());
        }
        if !(self.tol >= 0.0) {
            return fail(format!("tolerance {} must be nonnegative", self.tol));
        }
        if let Some(mc) = self.cert_scale {
            if mc < self.m0 {
                return fail(format!("certificate scale {mc} is coarser than m0 = {}", self.m0));
            }
        }
        Ok(())
    }

    pub fn cert_scale(&self) -> i32 {
        self.cert_scale.unwrap_or(self.m0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> GlueParams {
        GlueParams {
            r1: 0.52,
            r2: 0.95,
            m0: 8,
            m2: 7,
            m3: 26,
            eps1: 0.015,
            eps2: 1.0 / 128.0,
            t1: 1e-4,
            tau: 5e-6,
            ks: vec![1, 10, 100],
            slice_samples: 16,
            cert_scale: None,
            seed: 7,
            tol: 1e-9,
        }
    }

    #[test]
    fn sample_is_valid() {
        sample().validate().unwrap();
    }

    #[test]
    fn each_inequality_is_enforced() {
        let cases: Vec<Box<dyn Fn(&mut GlueParams)>> = vec![
            Box::new(|p| p.m0 = 6),
            Box::new(|p| p.eps2 = 0.01),
            Box::new(|p| p.tau = 1e-5),
            Box::new(|p| p.m3 = 15),
            Box::new(|p| p.t1 = 0.5),
            Box::new(|p| p.ks = vec![3, 2]),
        ];
        for f in cases {
            let mut p = sample();
            f(&mut p);
            assert!(p.validate().is_err(), "{p:?}");
        }
    }
}
