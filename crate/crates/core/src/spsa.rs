//! First-order SPSA with learning-rate calibration.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpsaConfig {
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A` in `a_k = a / (k + A)^α`.
    pub stability: f64,
    pub c: f64,
    pub max_iterations: usize,
    pub calibration_calls: usize,
    /// Size of the first step the calibration aims for, in radians.
    pub target_first_step: f64,
    /// Skip calibration and use this `a` directly.
    pub learning_rate: Option<f64>,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            alpha: 0.602,
            gamma: 0.101,
            stability: 0.0,
            c: 0.2,
            max_iterations: 250,
            calibration_calls: 50,
            target_first_step: 2.0 * PI / 10.0,
            learning_rate: None,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > self.gamma && self.gamma > 0.0) {
            return Err(Error::Argument(format!(
                "SPSA needs alpha > gamma > 0, got alpha {} gamma {}",
                self.alpha, self.gamma
            )));
        }
        if !(self.c > 0.0) || self.stability < 0.0 {
            return Err(Error::Argument("SPSA needs c > 0 and A >= 0".into()));
        }
        if self.learning_rate.is_none() && (self.calibration_calls == 0 || self.calibration_calls % 2 != 0) {
            return Err(Error::Argument(format!(
                "calibration needs a positive even number of calls, got {}",
                self.calibration_calls
            )));
        }
        Ok(())
    }

    /// `c_k = c / k^γ`, `k ≥ 1`.
    pub fn c_k(&self, k: usize) -> f64 {
        self.c / (k as f64).powf(self.gamma)
    }

    /// `a_k = a / (k + A)^α`, `k ≥ 1`.
    pub fn a_k(&self, a: f64, k: usize) -> f64 {
        a / (k as f64 + self.stability).powf(self.alpha)
    }

    /// Cost evaluations of a full run.
    pub fn total_evaluations(&self) -> usize {
        let cal = if self.learning_rate.is_some() { 0 } else { self.calibration_calls };
        cal + 2 * self.max_iterations + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalKind {
    Calibration,
    GradientPlus,
    GradientMinus,
    Final,
}

impl EvalKind {
    pub fn name(self) -> &'static str {
        match self {
            EvalKind::Calibration => "calibration",
            EvalKind::GradientPlus => "gradient_plus",
            EvalKind::GradientMinus => "gradient_minus",
            EvalKind::Final => "final",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [EvalKind::Calibration, EvalKind::GradientPlus, EvalKind::GradientMinus, EvalKind::Final]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

/// Where in the protocol a cost call happens. Calibration calls carry
/// iteration 0; the final call carries `max_iterations + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalContext<'a> {
    pub kind: EvalKind,
    pub iteration: usize,
    /// Running count of cost calls, from 0.
    pub index: usize,
    /// The current iterate (not the perturbed point being evaluated).
    pub iterate: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub theta: Vec<f64>,
    pub f_plus: f64,
    pub f_minus: f64,
}

#[derive(Debug, Clone)]
pub struct SpsaState {
    /// Completed iterations.
    pub k: usize,
    pub theta: Vec<f64>,
    pub a: f64,
    pub history: Vec<StepRecord>,
    pub evaluations: usize,
    rng: ChaCha8Rng,
}

impl SpsaState {
    pub fn new(theta0: Vec<f64>, a: f64, config: &SpsaConfig) -> Self {
        SpsaState {
            k: 0,
            theta: theta0,
            a,
            history: Vec::new(),
            evaluations: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }
}

pub fn rademacher<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Uniform in `[-π, π)` per parameter.
pub fn random_initial_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-PI..PI)).collect()
}

fn checked<F>(cost: &mut F, x: &[f64], ctx: EvalContext<'_>) -> Result<f64>
where
    F: FnMut(&[f64], EvalContext<'_>) -> Result<f64>,
{
    let v = cost(x, ctx)?;
    if v.is_nan() {
        return Err(Error::Evaluation {
            iteration: ctx.iteration,
            message: format!("{} evaluation #{} returned NaN", ctx.kind.name(), ctx.index),
        });
    }
    Ok(v)
}

fn shifted(theta: &[f64], delta: &[f64], h: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + h * d).collect()
}

/// Pick `a` so the expected first step has size `target_first_step`, from
/// `calibration_calls / 2` Rademacher pairs around `state.theta`.
pub fn calibrate<F>(state: &mut SpsaState, cost: &mut F, config: &SpsaConfig) -> Result<f64>
where
    F: FnMut(&[f64], EvalContext<'_>) -> Result<f64>,
{
    let pairs = config.calibration_calls / 2;
    let theta = state.theta.clone();
    let mut total = 0.0;
    for _ in 0..pairs {
        let delta = rademacher(&mut state.rng, theta.len());
        let mut eval = |x: Vec<f64>, st: &mut SpsaState| {
            let ctx = EvalContext {
                kind: EvalKind::Calibration,
                iteration: 0,
                index: st.evaluations,
                iterate: &theta,
            };
            st.evaluations += 1;
            checked(cost, &x, ctx)
        };
        let fp = eval(shifted(&theta, &delta, config.c), state)?;
        let fm = eval(shifted(&theta, &delta, -config.c), state)?;
        total += (fp - fm).abs() / (2.0 * config.c);
    }
    let g = total / pairs as f64;
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Degenerate(format!(
            "calibration gradient magnitude is {g}; the cost does not vary around the start point"
        )));
    }
    let a = config.target_first_step * (1.0 + config.stability).powf(config.alpha) / g;
    state.a = a;
    Ok(a)
}

/// One SPSA iteration along a given ±1 direction.
pub fn step_with_direction<F>(state: &mut SpsaState, cost: &mut F, config: &SpsaConfig, delta: &[f64]) -> Result<()>
where
    F: FnMut(&[f64], EvalContext<'_>) -> Result<f64>,
{
    let k = state.k + 1;
    let ck = config.c_k(k);
    let theta = state.theta.clone();
    let mut values = [0.0; 2];
    for (slot, (kind, h)) in [(EvalKind::GradientPlus, ck), (EvalKind::GradientMinus, -ck)]
        .into_iter()
        .enumerate()
    {
        let ctx = EvalContext {
            kind,
            iteration: k,
            index: state.evaluations,
            iterate: &theta,
        };
        state.evaluations += 1;
        values[slot] = checked(cost, &shifted(&theta, delta, h), ctx)?;
    }
    let [fp, fm] = values;
    let ak = config.a_k(state.a, k);
    let scale = (fp - fm) / (2.0 * ck);
    for (t, d) in state.theta.iter_mut().zip(delta) {
        *t -= ak * scale * d;
    }
    state.history.push(StepRecord {
        k,
        theta,
        f_plus: fp,
        f_minus: fm,
    });
    state.k = k;
    Ok(())
}

pub fn step<F>(state: &mut SpsaState, cost: &mut F, config: &SpsaConfig) -> Result<()>
where
    F: FnMut(&[f64], EvalContext<'_>) -> Result<f64>,
{
    let delta = rademacher(&mut state.rng, state.theta.len());
    step_with_direction(state, cost, config, &delta)
}

#[derive(Debug, Clone)]
pub struct SpsaOutcome {
    pub theta: Vec<f64>,
    pub final_value: f64,
    pub state: SpsaState,
}

/// Calibrate, iterate `max_iterations` times, then evaluate the final point.
pub fn run<F>(mut cost: F, theta0: Vec<f64>, config: &SpsaConfig) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64], EvalContext<'_>) -> Result<f64>,
{
    config.validate()?;
    let mut state = SpsaState::new(theta0, config.learning_rate.unwrap_or(0.0), config);
    if config.learning_rate.is_none() {
        calibrate(&mut state, &mut cost, config)?;
    }
    for _ in 0..config.max_iterations {
        step(&mut state, &mut cost, config)?;
    }
    let ctx = EvalContext {
        kind: EvalKind::Final,
        iteration: config.max_iterations + 1,
        index: state.evaluations,
        iterate: &state.theta.clone(),
    };
    state.evaluations += 1;
    let final_value = checked(&mut cost, &state.theta.clone(), ctx)?;
    Ok(SpsaOutcome {
        theta: state.theta.clone(),
        final_value,
        state,
    })
}
