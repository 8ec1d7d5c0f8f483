//! Offline completion provider that samples Likert answers from a
//! configurable latent profile: per-construct mean plus temperature-scaled
//! Gaussian noise, seeded. Exists solely to make the full pipeline testable
//! without a live endpoint.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sha256_hex, BackendError, CompletionBackend, CompletionRequest};
use crate::instrument::{Instrument, InstrumentKind, Item};

fn default_noise() -> f64 {
    1.0
}

fn default_age_mean() -> f64 {
    30.0
}

fn default_age_slope() -> f64 {
    -6.0
}

fn default_age_noise() -> f64 {
    4.0
}

fn default_female_share_base() -> f64 {
    0.85
}

fn default_female_share_slope() -> f64 {
    -0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedDemographics {
    #[serde(default = "default_age_mean")]
    pub age_mean: f64,
    /// Linear change of mean age per unit temperature.
    #[serde(default = "default_age_slope")]
    pub age_slope: f64,
    #[serde(default = "default_age_noise")]
    pub age_noise: f64,
    #[serde(default = "default_female_share_base")]
    pub female_share_base: f64,
    #[serde(default = "default_female_share_slope")]
    pub female_share_slope: f64,
}

impl Default for ScriptedDemographics {
    fn default() -> Self {
        ScriptedDemographics {
            age_mean: default_age_mean(),
            age_slope: default_age_slope(),
            age_noise: default_age_noise(),
            female_share_base: default_female_share_base(),
            female_share_slope: default_female_share_slope(),
        }
    }
}

/// Latent respondent profile the scripted backend draws from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedProfile {
    /// Target composite level per construct, in post-scoring scale units.
    pub construct_means: BTreeMap<String, f64>,
    /// Optional linear trend of the latent level in temperature.
    #[serde(default)]
    pub construct_slopes: BTreeMap<String, f64>,
    /// Noise standard deviation at temperature 1.0; scales linearly with
    /// temperature, so temperature 0.0 is exactly deterministic.
    #[serde(default = "default_noise")]
    pub noise_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demographics: Option<ScriptedDemographics>,
}

impl ScriptedProfile {
    /// Flat profile: every construct sits at `level` with no temperature trend.
    pub fn flat(instrument: &Instrument, level: f64) -> Self {
        ScriptedProfile {
            construct_means: instrument
                .constructs
                .iter()
                .map(|c| (c.clone(), level))
                .collect(),
            construct_slopes: BTreeMap::new(),
            noise_scale: default_noise(),
            demographics: Some(ScriptedDemographics::default()),
        }
    }
}

pub struct ScriptedBackend {
    instrument: Instrument,
    profile: ScriptedProfile,
    seed: u64,
}

impl ScriptedBackend {
    pub fn new(instrument: Instrument, profile: ScriptedProfile, seed: u64) -> Self {
        ScriptedBackend {
            instrument,
            profile,
            seed,
        }
    }

    fn resolve_item(&self, request: &CompletionRequest) -> Result<&Item, BackendError> {
        if let Some(tag) = &request.tag {
            return self
                .instrument
                .item_by_id(&tag.item_id)
                .ok_or_else(|| BackendError::UnknownItem(format!("item id `{}`", tag.item_id)));
        }
        // Untagged requests fall back to matching the final statement text.
        let statement = request
            .prompt
            .rsplit("Statement: ")
            .next()
            .and_then(|tail| tail.lines().next())
            .unwrap_or("");
        self.instrument
            .item_by_text(statement)
            .or_else(|| {
                self.instrument
                    .items
                    .iter()
                    .find(|i| request.prompt.contains(&i.text))
            })
            .ok_or_else(|| {
                BackendError::UnknownItem(format!(
                    "no item matches the prompt statement `{}`",
                    statement.chars().take(60).collect::<String>()
                ))
            })
    }

    fn rng_for(&self, request: &CompletionRequest, item: &Item) -> ChaCha8Rng {
        let rep = request.tag.as_ref().map_or(0, |t| t.rep);
        let key = format!(
            "{}|{}|{}|{:016x}|{rep}",
            self.seed,
            self.instrument.id,
            item.id,
            request.temperature.to_bits()
        );
        let digest = sha256_hex(key.as_bytes());
        let mut seed_bytes = [0u8; 32];
        for (i, chunk) in digest.as_bytes().chunks(2).take(32).enumerate() {
            seed_bytes[i] = u8::from_str_radix(std::str::from_utf8(chunk).unwrap(), 16).unwrap();
        }
        ChaCha8Rng::from_seed(seed_bytes)
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on two uniforms.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

impl CompletionBackend for ScriptedBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        request.validate()?;
        let item = self.resolve_item(request)?;
        let t = request.temperature;
        let mut rng = self.rng_for(request, item);

        if self.instrument.kind == InstrumentKind::FreeText {
            let demo = self.profile.demographics.clone().unwrap_or_default();
            return Ok(match item.construct.as_str() {
                "age" => {
                    let noise = t * demo.age_noise * standard_normal(&mut rng);
                    let age = (demo.age_mean + demo.age_slope * t + noise)
                        .round()
                        .clamp(13.0, 90.0);
                    format!(" {}", age as i64)
                }
                "gender" => {
                    let p_female =
                        (demo.female_share_base + demo.female_share_slope * t).clamp(0.0, 1.0);
                    let u: f64 = rng.gen_range(0.0..1.0);
                    if u < p_female {
                        " female".to_string()
                    } else if u < p_female + 0.02 {
                        " non-binary".to_string()
                    } else {
                        " male".to_string()
                    }
                }
                other => {
                    return Err(BackendError::UnknownItem(format!(
                        "no scripted rule for free-text construct `{other}`"
                    )))
                }
            });
        }

        let scale = self
            .instrument
            .scale
            .as_ref()
            .expect("likert instrument has a scale");
        let mean = self
            .profile
            .construct_means
            .get(&item.construct)
            .copied()
            .unwrap_or((scale.min + scale.max) as f64 / 2.0);
        let slope = self
            .profile
            .construct_slopes
            .get(&item.construct)
            .copied()
            .unwrap_or(0.0);
        let latent = mean + slope * t + t * self.profile.noise_scale * standard_normal(&mut rng);
        let target = latent.round().clamp(scale.min as f64, scale.max as f64) as i32;
        // The latent level is the post-scoring value; emit the raw answer
        // that scores back to it under the instrument's keying and inversion.
        let mut answer = target;
        if self.instrument.invert_on_score {
            answer = scale.min + scale.max - answer;
        }
        if item.reverse_keyed {
            answer = scale.min + scale.max - answer;
        }
        Ok(format!(" {answer}"))
    }
}
