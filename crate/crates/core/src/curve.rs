//! Sampled effective Hamiltonian curves and their CSV form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactQuadrature,
    NonconvexEdge,
    NumericPde,
    HillSpectral,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact-quadrature",
            Method::NonconvexEdge => "nonconvex-edge",
            Method::NumericPde => "numeric-pde",
            Method::HillSpectral => "hill-spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub p: f64,
    pub hbar: f64,
    /// Error estimate for `hbar`.
    pub err: f64,
}

/// A sampled map `p -> H̄(p)` with strictly increasing `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCurve {
    method: Method,
    samples: Vec<CurveSample>,
}

impl EffectiveCurve {
    pub fn new(method: Method, samples: Vec<CurveSample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].p > w[0].p)) {
            return Err(Error::Precondition("curve samples must have strictly increasing p".into()));
        }
        Ok(Self { method, samples })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The sample whose momentum is within `tol` of `p`.
    pub fn at(&self, p: f64, tol: f64) -> Option<&CurveSample> {
        self.samples.iter().find(|s| (s.p - p).abs() <= tol)
    }

    /// CSV with header `p,hbar,method,err`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,hbar,method,err\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", fmt_num(s.p), fmt_num(s.hbar), self.method.tag(), fmt_num(s.err));
        }
        out
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}
