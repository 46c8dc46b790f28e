//! One flat record holding every tolerance and density of a run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{AnalysisConfig, LimitConfig, ScanConfig};
use crate::conics::{SamplerConfig, SweepConfig, TouchConfig};
use crate::poly::RootConfig;
use crate::surface::{GridConfig, SearchConfig, Sweep, ValidationConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("`{key}` must be strictly positive, got {value}")]
    NotPositive { key: &'static str, value: f64 },
    #[error("`{key}` must be at least 16, got {value}")]
    TooCoarse { key: &'static str, value: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabConfig {
    pub root_tol: f64,
    pub equality_tol: f64,
    pub degenerate_tol: f64,
    pub validation_spacing: f64,
    pub scan_grid: usize,
    pub scan_tol: f64,
    pub zero_threshold: f64,
    pub infinity_threshold: f64,
    pub lambda_samples: usize,
    pub theta_samples: usize,
    pub alpha_samples: usize,
    pub psi_samples: usize,
    pub search_a: f64,
    pub search_b: f64,
    pub search_lambda0: f64,
    pub search_q0_lo: f64,
    pub search_q0_hi: f64,
    pub search_q0_steps: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        let roots = RootConfig::default();
        let touch = TouchConfig::default();
        let scan = ScanConfig::default();
        let limits = LimitConfig::default();
        let sweep = SweepConfig::default();
        let search = SearchConfig::default();
        Self {
            root_tol: roots.cluster_radius,
            equality_tol: touch.equality_tol,
            degenerate_tol: touch.degenerate_tol,
            validation_spacing: GridConfig::default().spacing,
            scan_grid: scan.grid,
            scan_tol: scan.tol,
            zero_threshold: limits.zero,
            infinity_threshold: limits.infinity,
            lambda_samples: sweep.lambda_samples,
            theta_samples: sweep.theta_samples,
            alpha_samples: 16,
            psi_samples: 1000,
            search_a: search.a.lo,
            search_b: search.b.lo,
            search_lambda0: search.lambda0,
            search_q0_lo: search.q0.lo,
            search_q0_hi: search.q0.hi,
            search_q0_steps: search.q0.steps,
        }
    }
}

impl LabConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        let positive = [
            ("root_tol", self.root_tol),
            ("equality_tol", self.equality_tol),
            ("degenerate_tol", self.degenerate_tol),
            ("validation_spacing", self.validation_spacing),
            ("scan_tol", self.scan_tol),
            ("zero_threshold", self.zero_threshold),
            ("infinity_threshold", self.infinity_threshold),
            ("search_a", self.search_a),
            ("search_b", self.search_b),
        ];
        for (key, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConfigError::NotPositive { key, value });
            }
        }
        let dense = [
            ("scan_grid", self.scan_grid),
            ("psi_samples", self.psi_samples),
        ];
        for (key, value) in dense {
            if value < 16 {
                return Err(ConfigError::TooCoarse { key, value });
            }
        }
        Ok(())
    }

    pub fn roots(&self) -> RootConfig {
        RootConfig {
            cluster_radius: self.root_tol,
            ..RootConfig::default()
        }
    }

    pub fn validation(&self) -> ValidationConfig {
        ValidationConfig {
            roots: self.roots(),
            grid: GridConfig {
                spacing: self.validation_spacing,
                ..GridConfig::default()
            },
        }
    }

    pub fn touch(&self) -> TouchConfig {
        TouchConfig {
            roots: self.roots(),
            equality_tol: self.equality_tol,
            degenerate_tol: self.degenerate_tol,
            ..TouchConfig::default()
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig::default()
    }

    pub fn sweep(&self) -> SweepConfig {
        SweepConfig {
            lambda_samples: self.lambda_samples,
            theta_samples: self.theta_samples,
            ..SweepConfig::default()
        }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            scan: ScanConfig {
                grid: self.scan_grid,
                tol: self.scan_tol,
                ..ScanConfig::default()
            },
            limits: LimitConfig {
                zero: self.zero_threshold,
                infinity: self.infinity_threshold,
                ..LimitConfig::default()
            },
        }
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            a: Sweep::fixed(self.search_a),
            b: Sweep::fixed(self.search_b),
            lambda0: self.search_lambda0,
            q0: Sweep {
                lo: self.search_q0_lo,
                hi: self.search_q0_hi,
                steps: self.search_q0_steps,
            },
            validation: self.validation(),
        }
    }
}
