//! Experiment configuration.
//!
//! The file is TOML restricted to flat `dotted.key = value` lines; every
//! physical quantity carries its unit in the key name. See `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::montecarlo::Exposure;
use crate::error::{Error, Result};
use crate::interference::Amplitude;
use crate::mixtures::TripleComponent;
use crate::neutron::{
    forward_amplitude, slab_phase, units, NuclearChannel, Slab, SlabPhase, SlabSpec, Spectrum,
    MIN_QUADRATURE_NODES,
};
use crate::quat::{exp_pure, PureAxis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classify,
    Simulate,
    Neutron,
    Fit,
    Mc,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Classify => "classify",
            Mode::Simulate => "simulate",
            Mode::Neutron => "neutron",
            Mode::Fit => "fit",
            Mode::Mc => "mc",
        })
    }
}

/// `"i"`, `"j"`, `"k"` or an explicit `[x, y, z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisDef {
    Named(String),
    Vector([f64; 3]),
}

impl Default for AxisDef {
    fn default() -> Self {
        AxisDef::Named("i".into())
    }
}

impl AxisDef {
    pub fn resolve(&self) -> Result<PureAxis> {
        match self {
            AxisDef::Named(n) => match n.as_str() {
                "i" => Ok(PureAxis::I),
                "j" => Ok(PureAxis::J),
                "k" => Ok(PureAxis::K),
                other => Err(Error::Schema(format!(
                    "unknown axis name {other:?} (use i, j, k or [x, y, z])"
                ))),
            },
            AxisDef::Vector([x, y, z]) => PureAxis::new(*x, *y, *z),
        }
    }
}

/// A scatterer given either directly (`magnitude_sqrt_barn`, `angle_deg`) or
/// through its S-wave channel (`delta_rad`, `eta`, plus a wave number).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererDef {
    pub magnitude_sqrt_barn: Option<f64>,
    pub angle_deg: Option<f64>,
    #[serde(default)]
    pub axis: AxisDef,
    pub delta_rad: Option<f64>,
    pub eta: Option<f64>,
    pub k_inv_angstrom: Option<f64>,
    pub four_pi_over_k2_barn: Option<f64>,
}

impl ScattererDef {
    pub fn amplitude(&self, id: &str) -> Result<Amplitude> {
        let axis = self.axis.resolve()?;
        let direct = self.magnitude_sqrt_barn.is_some() || self.angle_deg.is_some();
        let channel = self.delta_rad.is_some() || self.eta.is_some();
        match (direct, channel) {
            (true, false) => {
                let mag = self.magnitude_sqrt_barn.ok_or_else(|| {
                    Error::Schema(format!("scatterer.{id}.magnitude_sqrt_barn is required"))
                })?;
                let angle = self.angle_deg.unwrap_or(0.0).to_radians();
                Amplitude::new(mag, exp_pure(axis, angle))
            }
            (false, true) => {
                let ch = channel_from(
                    &format!("scatterer.{id}"),
                    self.delta_rad,
                    self.eta,
                    self.k_inv_angstrom,
                    self.four_pi_over_k2_barn,
                )?;
                forward_amplitude(&ch, axis)
            }
            (true, true) => Err(Error::Schema(format!(
                "scatterer.{id} mixes amplitude keys with channel keys"
            ))),
            (false, false) => Err(Error::Schema(format!(
                "scatterer.{id} needs magnitude_sqrt_barn or delta_rad/eta"
            ))),
        }
    }
}

fn channel_from(
    prefix: &str,
    delta: Option<f64>,
    eta: Option<f64>,
    k_inv_angstrom: Option<f64>,
    four_pi_over_k2: Option<f64>,
) -> Result<NuclearChannel> {
    let delta = delta.ok_or_else(|| Error::Schema(format!("{prefix}.delta_rad is required")))?;
    let eta = eta.unwrap_or(1.0);
    match (k_inv_angstrom, four_pi_over_k2) {
        (Some(k), None) => NuclearChannel::new(units::k_from_inv_angstrom(k), delta, eta),
        (None, Some(s)) => NuclearChannel::from_unitarity_scale(s, delta, eta),
        _ => Err(Error::Schema(format!(
            "{prefix} needs exactly one of k_inv_angstrom or four_pi_over_k2_barn"
        ))),
    }
}

/// One spin or polarization component of a mixed beam.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDef {
    pub weight: f64,
    #[serde(default)]
    pub scatterer: BTreeMap<String, ScattererDef>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureDef {
    #[serde(default)]
    pub spin_independent: bool,
}

/// A slab given either by its phase at the mean wave number or by its
/// material parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabDef {
    pub optical_deg: Option<f64>,
    pub attenuation: Option<f64>,
    pub delta_rad: Option<f64>,
    pub eta: Option<f64>,
    pub density_per_cm3: Option<f64>,
    pub thickness_cm: Option<f64>,
    #[serde(default)]
    pub axis: AxisDef,
    pub transmission: Option<f64>,
}

/// A resolved slab and, when it was given by material, its spec.
#[derive(Debug, Clone)]
pub struct ResolvedSlab {
    pub name: String,
    pub slab: Slab,
    pub spec: Option<SlabSpec>,
}

impl SlabDef {
    pub fn resolve(&self, name: &str, k0: Option<f64>) -> Result<ResolvedSlab> {
        let axis = self.axis.resolve()?;
        let transmission = self.transmission.unwrap_or(1.0);
        let by_phase = self.optical_deg.is_some() || self.attenuation.is_some();
        let by_material = self.delta_rad.is_some()
            || self.eta.is_some()
            || self.density_per_cm3.is_some()
            || self.thickness_cm.is_some();
        let prefix = format!("slab.{name}");
        match (by_phase, by_material) {
            (true, false) => {
                let optical = self
                    .optical_deg
                    .ok_or_else(|| Error::Schema(format!("{prefix}.optical_deg is required")))?;
                let phase =
                    SlabPhase::from_degrees(optical, self.attenuation.unwrap_or(0.0), axis)?;
                Ok(ResolvedSlab {
                    name: name.into(),
                    slab: Slab::new(phase, transmission)?,
                    spec: None,
                })
            }
            (false, true) => {
                let k0 = k0.ok_or_else(|| {
                    Error::Schema(format!(
                        "{prefix} is given by material; spectrum.k0_inv_angstrom is required"
                    ))
                })?;
                let channel = channel_from(&prefix, self.delta_rad, self.eta, Some(k0), None)?;
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| Error::Schema(format!("{prefix}.{key} is required")))
                };
                let spec = SlabSpec {
                    channel,
                    density: units::density_from_per_cm3(need(
                        self.density_per_cm3,
                        "density_per_cm3",
                    )?),
                    thickness: units::length_from_cm(need(self.thickness_cm, "thickness_cm")?),
                    axis,
                    transmission,
                };
                let phase = slab_phase(&spec)?;
                Ok(ResolvedSlab {
                    name: name.into(),
                    slab: Slab::new(phase, transmission)?,
                    spec: Some(spec),
                })
            }
            (true, true) => Err(Error::Schema(format!(
                "{prefix} mixes phase keys with material keys"
            ))),
            (false, false) => Err(Error::Schema(format!(
                "{prefix} needs optical_deg or material keys"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDef {
    pub k0_inv_angstrom: Option<f64>,
    #[serde(default)]
    pub relative_spread: f64,
    pub nodes: Option<usize>,
}

impl SpectrumDef {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            k0: self.k0_inv_angstrom.unwrap_or(1.0),
            relative_spread: self.relative_spread,
            nodes: self.nodes.unwrap_or(MIN_QUADRATURE_NODES),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McDef {
    /// Expected counts per barn of cross section, the same in every channel.
    pub counts_per_barn: Option<f64>,
    /// Expected counts in each channel.
    pub counts_per_channel: Option<f64>,
    pub trials: usize,
}

impl McDef {
    pub fn exposure(&self) -> Result<Exposure> {
        match (self.counts_per_barn, self.counts_per_channel) {
            (Some(r), None) => Ok(Exposure::CountsPerBarn(r)),
            (None, Some(n)) => Ok(Exposure::CountsPerChannel(n)),
            _ => Err(Error::Schema(
                "give exactly one of mc.counts_per_barn or mc.counts_per_channel".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub scatterer: BTreeMap<String, ScattererDef>,
    #[serde(default)]
    pub component: BTreeMap<String, ComponentDef>,
    pub mixture: Option<MixtureDef>,
    #[serde(default)]
    pub slab: BTreeMap<String, SlabDef>,
    /// Slab names in beam-traversal order; defaults to all slabs by name.
    pub order: Option<Vec<String>>,
    pub reference_axis: Option<AxisDef>,
    pub spectrum: Option<SpectrumDef>,
    pub mc: Option<McDef>,
}

const SCATTERER_IDS: [&str; 3] = ["1", "2", "3"];

fn three_amplitudes(defs: &BTreeMap<String, ScattererDef>, prefix: &str) -> Result<[Amplitude; 3]> {
    for id in defs.keys() {
        if !SCATTERER_IDS.contains(&id.as_str()) {
            return Err(Error::Schema(format!(
                "{prefix}scatterer id {id:?} must be 1, 2 or 3"
            )));
        }
    }
    let get = |id: &str| {
        defs.get(id)
            .ok_or_else(|| Error::Schema(format!("{prefix}scatterer.{id} is missing")))
            .and_then(|d| d.amplitude(id))
    };
    Ok([get("1")?, get("2")?, get("3")?])
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1) as u64)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    /// Checks the file's `mode` key (if any) against the requested mode.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        match self.mode {
            Some(m) if m != mode => {
                Err(Error::Schema(format!("config is for mode {m}, not {mode}")))
            }
            _ => Ok(()),
        }
    }

    pub fn amplitudes(&self) -> Result<[Amplitude; 3]> {
        three_amplitudes(&self.scatterer, "")
    }

    pub fn is_mixture(&self) -> bool {
        !self.component.is_empty()
    }

    pub fn ensemble(&self) -> Result<Vec<TripleComponent>> {
        if !self.scatterer.is_empty() {
            return Err(Error::Schema(
                "use either scatterer.* or component.*, not both".into(),
            ));
        }
        self.component
            .iter()
            .map(|(name, c)| {
                Ok(TripleComponent {
                    weight: c.weight,
                    amps: three_amplitudes(&c.scatterer, &format!("component.{name}."))?,
                })
            })
            .collect()
    }

    pub fn slabs(&self) -> Result<Vec<ResolvedSlab>> {
        if self.slab.is_empty() {
            return Err(Error::Schema("no slab.* entries".into()));
        }
        let k0 = self.spectrum.as_ref().and_then(|s| s.k0_inv_angstrom);
        let names: Vec<String> = match &self.order {
            Some(o) => o.clone(),
            None => self.slab.keys().cloned().collect(),
        };
        if names.is_empty() {
            return Err(Error::Schema("order is empty".into()));
        }
        names
            .iter()
            .map(|n| {
                self.slab
                    .get(n)
                    .ok_or_else(|| Error::Schema(format!("order names unknown slab {n:?}")))?
                    .resolve(n, k0)
            })
            .collect()
    }

    pub fn reference_axis(&self) -> Result<PureAxis> {
        self.reference_axis
            .as_ref()
            .map_or(Ok(PureAxis::I), AxisDef::resolve)
    }

    pub fn mc(&self) -> Result<&McDef> {
        self.mc.as_ref().ok_or_else(|| {
            Error::Schema(
                "mc.trials and mc.counts_per_barn or mc.counts_per_channel are required".into(),
            )
        })
    }
}
