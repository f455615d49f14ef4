use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    oracle_predict, FrozenModel, History, NoiseParams, NoisySampler, ObservationModel,
    PredictedRollout, VelocityModel,
};
use crate::env::WorldState;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Which forward model drives the planner.
///
/// String form: `oracle`, `frozen`, `velocity`, `noisy:p_fn,p_fp,sigma,n`,
/// or `none` (alias `random`) for the uniform-random policy that plans
/// nothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Oracle,
    Frozen,
    Velocity,
    Noisy(NoiseParams),
    Random,
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Oracle => "oracle",
            ModelSpec::Frozen => "frozen",
            ModelSpec::Velocity => "velocity",
            ModelSpec::Noisy(_) => "noisy",
            ModelSpec::Random => "none",
        }
    }

    pub fn n_samples(&self) -> u32 {
        match self {
            ModelSpec::Noisy(p) => p.n_samples,
            _ => 1,
        }
    }

    pub fn is_planning(&self) -> bool {
        !matches!(self, ModelSpec::Random)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Noisy(p) => write!(
                f,
                "noisy:{},{},{},{}",
                p.p_fn, p.p_fp, p.goal_sigma, p.n_samples
            ),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "oracle" => return Ok(ModelSpec::Oracle),
            "frozen" => return Ok(ModelSpec::Frozen),
            "velocity" => return Ok(ModelSpec::Velocity),
            "none" | "random" => return Ok(ModelSpec::Random),
            "noisy" => return Ok(ModelSpec::Noisy(NoiseParams::default())),
            _ => {}
        }
        let Some(args) = s.strip_prefix("noisy:") else {
            return Err(Error::Argument(format!(
                "unknown model {s:?} (expected oracle, frozen, velocity, noisy:p_fn,p_fp,sigma,n or none)"
            )));
        };
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Argument(format!(
                "noisy model takes 4 values p_fn,p_fp,sigma,n (got {args:?})"
            )));
        }
        let num = |i: usize| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad number {:?} in {s:?}", parts[i])))
        };
        let n_samples = parts[3]
            .parse::<u32>()
            .map_err(|_| Error::Argument(format!("bad sample count {:?} in {s:?}", parts[3])))?;
        let params = NoiseParams {
            p_fn: num(0)?,
            p_fp: num(1)?,
            goal_sigma: num(2)?,
            n_samples,
        };
        params.validate()?;
        Ok(ModelSpec::Noisy(params))
    }
}

enum Kind {
    Oracle,
    Observation(Box<dyn ObservationModel>),
    Noisy(Box<NoisySampler>),
    Random,
}

/// A built model plus a counter of rollout generations.
///
/// Observation models are handed only the [`History`]; the hidden state is
/// passed on exclusively to the oracle and the noisy sampler.
pub struct Forecaster {
    spec: ModelSpec,
    kind: Kind,
    calls: u64,
    frames_generated: u64,
}

impl Forecaster {
    pub fn new(spec: ModelSpec, episode_seed: u64) -> Self {
        let kind = match spec {
            ModelSpec::Oracle => Kind::Oracle,
            ModelSpec::Frozen => Kind::Observation(Box::new(FrozenModel)),
            ModelSpec::Velocity => Kind::Observation(Box::new(VelocityModel)),
            ModelSpec::Noisy(p) => {
                Kind::Noisy(Box::new(NoisySampler::new(p, rng::stream(episode_seed, Stream::Model))))
            }
            ModelSpec::Random => Kind::Random,
        };
        Self {
            spec,
            kind,
            calls: 0,
            frames_generated: 0,
        }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Number of rollouts generated so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Total predicted frames across all rollouts.
    pub fn frames_generated(&self) -> u64 {
        self.frames_generated
    }

    pub fn predict(
        &mut self,
        state: &WorldState,
        history: &History,
        k: usize,
    ) -> Result<PredictedRollout> {
        let rollout = match &mut self.kind {
            Kind::Oracle => oracle_predict(state, k)?,
            Kind::Observation(model) => model.predict(history, k)?,
            Kind::Noisy(sampler) => sampler.predict(state, k)?,
            Kind::Random => {
                return Err(Error::Argument(
                    "the random policy has no forward model".into(),
                ))
            }
        };
        self.calls += 1;
        self.frames_generated += rollout.len() as u64;
        Ok(rollout)
    }
}
