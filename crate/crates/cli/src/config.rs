//! Experiment configuration: a single JSON document validated at load
//! time against the module invariants.

use lsprobe_core::acoustic::{AcousticIncident, AcousticMedium, IndexProfile};
use lsprobe_core::elastic::{DensityProfile, ElasticIncident, ElasticMedium};
use lsprobe_core::error::{Error, Result};
use lsprobe_core::geometry::{ShapeSpec, SurfacePoint};
use lsprobe_core::grid::GridSpec;
use lsprobe_core::linalg::Vec3;
use lsprobe_core::sphere::DirectionGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileConfig {
    Constant(f64),
    ConstantComplex([f64; 2]),
    RadialLinear { at_center: f64, at_boundary: f64 },
}

impl ProfileConfig {
    fn to_index(&self) -> IndexProfile {
        match self {
            ProfileConfig::Constant(v) => IndexProfile::Constant(Complex64::from(*v)),
            ProfileConfig::ConstantComplex([re, im]) => {
                IndexProfile::Constant(Complex64::new(*re, *im))
            }
            ProfileConfig::RadialLinear {
                at_center,
                at_boundary,
            } => IndexProfile::RadialLinear {
                at_center: Complex64::from(*at_center),
                at_boundary: Complex64::from(*at_boundary),
            },
        }
    }

    fn to_density(&self) -> Result<DensityProfile> {
        match self {
            ProfileConfig::Constant(v) => Ok(DensityProfile::Constant(*v)),
            ProfileConfig::ConstantComplex(_) => Err(Error::Config(
                "field 'medium.density': complex densities are not supported".into(),
            )),
            ProfileConfig::RadialLinear {
                at_center,
                at_boundary,
            } => Ok(DensityProfile::RadialLinear {
                at_center: *at_center,
                at_boundary: *at_boundary,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcousticMediumConfig {
    pub wavenumber: f64,
    pub index: ProfileConfig,
    #[serde(default)]
    pub contrast_floor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticMediumConfig {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub density: ProfileConfig,
    #[serde(default)]
    pub contrast_floor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "physics", rename_all = "lowercase")]
pub enum PhysicsConfig {
    Acoustic { medium: AcousticMediumConfig },
    Elastic { medium: ElasticMediumConfig },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub half_extent: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionsConfig {
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl Default for DirectionsConfig {
    fn default() -> Self {
        DirectionsConfig {
            n_polar: 16,
            n_azimuth: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncidentConfig {
    pub direction: Vec3,
    /// Shear polarization (elastic only).
    pub polarization: Option<Vec3>,
    #[serde(default = "one")]
    pub p_amp: f64,
    #[serde(default = "one")]
    pub s_amp: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnchorConfig {
    /// Ray-cast from the shape center: the true boundary point.
    Direction { direction: Vec3 },
    /// Explicit candidate point with a candidate normal.
    Explicit { position: Vec3, normal: Vec3 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeBlockConfig {
    pub anchors: Vec<AnchorConfig>,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub physics: PhysicsConfig,
    pub shape: ShapeSpec,
    pub grid: GridConfig,
    #[serde(default)]
    pub directions: DirectionsConfig,
    pub incident: Option<IncidentConfig>,
    pub probe: Option<ProbeBlockConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// For constant-index acoustic balls: also compare the far field
    /// against the separation-of-variables reference and report the error.
    #[serde(default)]
    pub validate_against_series: bool,
}

/// Validated, solver-ready experiment.
#[derive(Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub grid: GridSpec,
    pub directions: DirectionGrid,
    pub medium: Medium,
}

#[derive(Debug)]
pub enum Medium {
    Acoustic(AcousticMedium),
    Elastic(ElasticMedium),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    /// Validate every referenced field against its module invariants.
    pub fn build(self) -> Result<Experiment> {
        self.shape.validate()?;
        let grid = GridSpec::cube_around(&self.shape, self.grid.half_extent, self.grid.n)?;
        let directions =
            DirectionGrid::gauss_legendre(self.directions.n_polar, self.directions.n_azimuth)?;
        if self.solver.tol <= 0.0 {
            return Err(Error::Config("field 'solver.tol' must be positive".into()));
        }
        if let Some(probe) = &self.probe {
            if probe.j_min < 1 || probe.j_min > probe.j_max {
                return Err(Error::Config(
                    "field 'probe': need 1 <= j_min <= j_max".into(),
                ));
            }
            if 1.0 / (probe.j_max as f64) < 2.0 * grid.spacing {
                return Err(Error::Config(format!(
                    "field 'probe.j_max': {} violates the resolvability cap 1/j >= 2h \
                     (h = {}, largest admissible j = {})",
                    probe.j_max,
                    grid.spacing,
                    (1.0 / (2.0 * grid.spacing)).floor() as u32
                )));
            }
            if probe.delta <= 0.0 {
                return Err(Error::Config("field 'probe.delta' must be positive".into()));
            }
        }
        let medium = match &self.physics {
            PhysicsConfig::Acoustic { medium } => Medium::Acoustic(AcousticMedium::new(
                medium.wavenumber,
                self.shape.clone(),
                medium.index.to_index(),
                medium.contrast_floor,
            )?),
            PhysicsConfig::Elastic { medium } => Medium::Elastic(ElasticMedium::new(
                medium.lambda,
                medium.mu,
                medium.omega,
                self.shape.clone(),
                medium.density.to_density()?,
                medium.contrast_floor,
            )?),
        };
        Ok(Experiment {
            config: self,
            grid,
            directions,
            medium,
        })
    }
}

impl Experiment {
    pub fn acoustic_incident(&self) -> Result<AcousticIncident> {
        let inc = self
            .config
            .incident
            .as_ref()
            .ok_or_else(|| Error::Config("field 'incident' is required for forward runs".into()))?;
        Ok(AcousticIncident::PlaneWave {
            direction: inc.direction,
        })
    }

    pub fn elastic_incident(&self) -> Result<ElasticIncident> {
        let inc = self
            .config
            .incident
            .as_ref()
            .ok_or_else(|| Error::Config("field 'incident' is required for forward runs".into()))?;
        let polarization = inc.polarization.ok_or_else(|| {
            Error::Config("field 'incident.polarization' is required for elastic runs".into())
        })?;
        Ok(ElasticIncident::PlaneWave {
            direction: inc.direction,
            polarization,
            p_amp: inc.p_amp,
            s_amp: inc.s_amp,
        })
    }

    pub fn resolve_anchor(&self, anchor: &AnchorConfig) -> Result<SurfacePoint> {
        match anchor {
            AnchorConfig::Direction { direction } => {
                self.config.shape.surface_point_along(direction)
            }
            AnchorConfig::Explicit { position, normal } => SurfacePoint::new(*position, *normal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ACOUSTIC: &str = r#"{
        "physics": "acoustic",
        "shape": {"kind": "ball", "params": {"radius": 0.8}, "center": [0, 0, 0]},
        "medium": {"wavenumber": 1.0, "index": {"constant": 1.5}, "contrast_floor": 0.4},
        "grid": {"half_extent": 1.0, "n": 32},
        "incident": {"direction": [0, 0, 1]},
        "probe": {"anchors": [{"direction": [0, 0, 1]}], "j_min": 2, "j_max": 8}
    }"#;

    #[test]
    fn acoustic_config_roundtrip() {
        let cfg = ExperimentConfig::parse(ACOUSTIC).unwrap();
        let exp = cfg.build().unwrap();
        assert!(matches!(exp.medium, Medium::Acoustic(_)));
        assert_eq!(exp.grid.dims, [32; 3]);
        assert_eq!(exp.directions.len(), 16 * 32);
    }

    #[test]
    fn probe_cap_is_rejected_with_a_diagnostic() {
        let bad = ACOUSTIC.replace("\"j_max\": 8", "\"j_max\": 40");
        let err = ExperimentConfig::parse(&bad).unwrap().build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("probe.j_max"), "{msg}");
        assert!(msg.contains("1/j >= 2h"), "{msg}");
    }

    #[test]
    fn malformed_field_is_named() {
        let bad = ACOUSTIC.replace("0.8", "-0.8");
        let err = ExperimentConfig::parse(&bad).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("radius"), "{err}");
    }

    #[test]
    fn elastic_config_parses() {
        let text = r#"{
            "physics": "elastic",
            "shape": {"kind": "ball", "params": {"radius": 0.8}, "center": [0, 0, 0]},
            "medium": {"lambda": 1.0, "mu": 1.0, "omega": 1.0,
                       "density": {"constant": 1.3}, "contrast_floor": 0.2},
            "grid": {"half_extent": 1.0, "n": 24},
            "incident": {"direction": [0, 0, 1], "polarization": [1, 0, 0]}
        }"#;
        let exp = ExperimentConfig::parse(text).unwrap().build().unwrap();
        assert!(matches!(exp.medium, Medium::Elastic(_)));
        exp.elastic_incident().unwrap();
    }
}
