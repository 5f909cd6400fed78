//! Noiseless QAOA statevector simulation.
//!
//! The state starts in the uniform superposition, then alternates the
//! diagonal cost phase `e^(-i gamma C(z))` (with `C(z)` the cut value of
//! basis state `z`) and the transverse-field mixer `e^(-i beta X)` on every
//! qubit, layer by layer. Cut values over the whole basis are precomputed
//! once per graph by a Gray-code walk and shared by the phase, expectation,
//! and sampling paths.
//!
//! Measurement shots are drawn from the exact `|amplitude|^2` distribution,
//! by inverse CDF for small shot counts and by an alias table when the shot
//! budget is large relative to the basis; both methods sample the same
//! distribution, and the choice is reported so runs can be reproduced.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::math;
use crate::rng::CounterRng;

/// Default cap on simulated qubits (2^24 amplitudes, ~256 MiB).
pub const DEFAULT_SIM_CAP: usize = 24;

/// Complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    fn mul(self, other: Complex) -> Complex {
        Complex {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }
}

/// Depth and angles of a QAOA circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidParam("depth must be at least 1".into()));
        }
        if gammas.len() != betas.len() {
            return Err(Error::LengthMismatch {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        Ok(Self { gammas, betas })
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `2^n` complex amplitudes; basis index bit `i` is qubit (vertex) `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amps: Vec<Complex>,
    n: usize,
}

impl Statevector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Wrap explicit amplitudes; the norm must already be 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex>, n: usize) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::LengthMismatch {
                expected: 1usize << n,
                got: amps.len(),
            });
        }
        let state = Self { amps, n };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Numeric(alloc::format!(
                "statevector norm^2 = {norm}, expected 1"
            )));
        }
        Ok(state)
    }
}

/// Uniform superposition over all bitstrings.
pub fn initial_state(n: usize, cap: usize) -> Result<Statevector> {
    if n > cap {
        return Err(Error::SimulationCap { n, cap });
    }
    if n == 0 {
        return Err(Error::InvalidParam("qubit count must be positive".into()));
    }
    let dim = 1usize << n;
    let amp = 1.0 / math::sqrt(dim as f64);
    Ok(Statevector {
        amps: alloc::vec![Complex::new(amp, 0.0); dim],
        n,
    })
}

/// Cut values of every basis state, indexed by bitstring.
#[derive(Debug, Clone)]
pub struct CostTable {
    values: Vec<f64>,
}

impl CostTable {
    /// Fill the table with one Gray-code walk over the full basis,
    /// re-evaluating periodically to stop incremental drift.
    pub fn build(graph: &WeightedGraph) -> CostTable {
        let n = graph.n();
        let adj = graph.adjacency();
        let dim = 1u64 << n;
        let mut values = alloc::vec![0.0; dim as usize];
        let mut bits = 0u64;
        let mut value = 0.0;
        values[0] = 0.0;
        for c in 1..dim {
            let flipped = c.trailing_zeros() as usize;
            let side = (bits >> flipped) & 1;
            let mut delta = 0.0;
            for &(u, w) in &adj[flipped] {
                if (bits >> u) & 1 == side {
                    delta += w;
                } else {
                    delta -= w;
                }
            }
            bits ^= 1 << flipped;
            value += delta;
            if c % (1 << 16) == 0 {
                value = graph.cut_value_bits(bits);
            }
            values[bits as usize] = value;
        }
        CostTable { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Multiply each amplitude by `e^(-i gamma C(z))` using a prebuilt table.
pub fn apply_cost_phase_with(state: &mut Statevector, table: &CostTable, gamma: f64) {
    debug_assert_eq!(table.values.len(), state.amps.len());
    for (amp, &cost) in state.amps.iter_mut().zip(&table.values) {
        let angle = -gamma * cost;
        let phase = Complex::new(math::cos(angle), math::sin(angle));
        *amp = amp.mul(phase);
    }
}

/// Diagonal cost evolution `e^(-i gamma H_C)`.
pub fn apply_cost_phase(state: &mut Statevector, graph: &WeightedGraph, gamma: f64) -> Result<()> {
    if graph.n() != state.n {
        return Err(Error::LengthMismatch {
            expected: state.n,
            got: graph.n(),
        });
    }
    let table = CostTable::build(graph);
    apply_cost_phase_with(state, &table, gamma);
    Ok(())
}

/// Transverse-field mixer `e^(-i beta X)` on every qubit: amplitude pairs
/// differing in one bit become
/// `(a cos b - i b_ sin b, b_ cos b - i a sin b)`.
pub fn apply_mixer(state: &mut Statevector, beta: f64) {
    let cos_b = math::cos(beta);
    let sin_b = math::sin(beta);
    let n = state.n;
    for q in 0..n {
        let stride = 1usize << q;
        let block = stride << 1;
        let mut base = 0;
        while base < state.amps.len() {
            for low in base..base + stride {
                let a = state.amps[low];
                let b = state.amps[low + stride];
                state.amps[low] =
                    Complex::new(a.re * cos_b + b.im * sin_b, a.im * cos_b - b.re * sin_b);
                state.amps[low + stride] =
                    Complex::new(b.re * cos_b + a.im * sin_b, b.im * cos_b - a.re * sin_b);
            }
            base += block;
        }
    }
}

/// Build `|psi(gamma, beta)>`: cost phase then mixer, layers in order.
pub fn build_state(graph: &WeightedGraph, params: &QaoaParams, cap: usize) -> Result<Statevector> {
    let mut state = initial_state(graph.n(), cap)?;
    let table = CostTable::build(graph);
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        apply_cost_phase_with(&mut state, &table, gamma);
        apply_mixer(&mut state, beta);
    }
    Ok(state)
}

/// `<H_C> = Σ_z |a_z|^2 C(z)`.
pub fn expectation(state: &Statevector, graph: &WeightedGraph) -> Result<f64> {
    if graph.n() != state.n {
        return Err(Error::LengthMismatch {
            expected: state.n,
            got: graph.n(),
        });
    }
    let table = CostTable::build(graph);
    Ok(expectation_with(state, &table))
}

pub fn expectation_with(state: &Statevector, table: &CostTable) -> f64 {
    state
        .amps
        .iter()
        .zip(&table.values)
        .map(|(a, &c)| a.norm_sqr() * c)
        .sum()
}

/// How measurement outcomes were drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMethod {
    /// Binary search on the probability prefix sums.
    InverseCdf,
    /// Vose alias table; preferred once the shot budget is large relative
    /// to the basis size.
    AliasTable,
}

impl SampleMethod {
    pub fn name(self) -> &'static str {
        match self {
            SampleMethod::InverseCdf => "inverse_cdf",
            SampleMethod::AliasTable => "alias_table",
        }
    }

    /// Method picked for `shots` draws from a `2^n`-point distribution.
    pub fn for_budget(shots: u64, n: usize) -> SampleMethod {
        if shots > (1u64 << n) / 16 {
            SampleMethod::AliasTable
        } else {
            SampleMethod::InverseCdf
        }
    }
}

/// One measurement: the sampled bitstring and its cut value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub bits: u64,
    pub value: f64,
}

/// Draws plus the method that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub method: SampleMethod,
    pub shots: Vec<Shot>,
}

/// Sample `count` measurement shots from `state`, reporting cut values from
/// `table`. The sampling method follows [`SampleMethod::for_budget`].
pub fn sample_shots(
    state: &Statevector,
    table: &CostTable,
    count: u64,
    rng: &mut CounterRng,
) -> Result<ShotRecord> {
    if count == 0 {
        return Err(Error::InvalidParam("shot count must be at least 1".into()));
    }
    let method = SampleMethod::for_budget(count, state.n);
    sample_shots_with(state, table, count, rng, method)
}

/// Sample with an explicit method (both draw from the same distribution).
pub fn sample_shots_with(
    state: &Statevector,
    table: &CostTable,
    count: u64,
    rng: &mut CounterRng,
    method: SampleMethod,
) -> Result<ShotRecord> {
    if table.values.len() != state.amps.len() {
        return Err(Error::LengthMismatch {
            expected: state.amps.len(),
            got: table.values.len(),
        });
    }
    let probs: Vec<f64> = state.amps.iter().map(|a| a.norm_sqr()).collect();
    let indices = match method {
        SampleMethod::InverseCdf => sample_inverse_cdf(&probs, count, rng),
        SampleMethod::AliasTable => sample_alias(&probs, count, rng),
    };
    let shots = indices
        .into_iter()
        .map(|z| Shot {
            bits: z as u64,
            value: table.values[z],
        })
        .collect();
    Ok(ShotRecord { method, shots })
}

fn sample_inverse_cdf(probs: &[f64], count: u64, rng: &mut CounterRng) -> Vec<usize> {
    let mut prefix = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        prefix.push(acc);
    }
    let total = acc;
    (0..count)
        .map(|_| {
            let u = rng.uniform() * total;
            prefix.partition_point(|&c| c <= u).min(probs.len() - 1)
        })
        .collect()
}

fn sample_alias(probs: &[f64], count: u64, rng: &mut CounterRng) -> Vec<usize> {
    // Vose's construction over probabilities normalized to mean 1.
    let n = probs.len();
    let total: f64 = probs.iter().sum();
    let scale = n as f64 / total;
    let mut accept = alloc::vec![0.0; n];
    let mut alias = alloc::vec![0usize; n];
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut scaled: Vec<f64> = probs.iter().map(|&p| p * scale).collect();
    for (i, &p) in scaled.iter().enumerate() {
        if p < 1.0 {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        accept[s] = scaled[s];
        alias[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if scaled[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    for &i in small.iter().chain(large.iter()) {
        accept[i] = 1.0;
        alias[i] = i;
    }
    (0..count)
        .map(|_| {
            let i = rng.below(n as u64) as usize;
            if rng.uniform() < accept[i] {
                i
            } else {
                alias[i]
            }
        })
        .collect()
}

/// Exhaustive `p = 1` angle search on a `resolution x resolution` grid over
/// `gamma in [0, pi)`, `beta in [0, pi/2)`, refined by one golden-section
/// pass per coordinate. Returns `(gamma, beta, expectation)`.
pub fn grid_optimize_p1(
    graph: &WeightedGraph,
    resolution: usize,
    cap: usize,
) -> Result<(f64, f64, f64)> {
    use core::f64::consts::PI;
    if resolution < 2 {
        return Err(Error::InvalidParam(
            "grid resolution must be at least 2".into(),
        ));
    }
    let table = CostTable::build(graph);
    let eval = |gamma: f64, beta: f64| -> Result<f64> {
        let mut state = initial_state(graph.n(), cap)?;
        apply_cost_phase_with(&mut state, &table, gamma);
        apply_mixer(&mut state, beta);
        Ok(expectation_with(&state, &table))
    };

    let gamma_step = PI / resolution as f64;
    let beta_step = (PI / 2.0) / resolution as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..resolution {
        let gamma = i as f64 * gamma_step;
        for j in 0..resolution {
            let beta = j as f64 * beta_step;
            let value = eval(gamma, beta)?;
            if value > best.2 {
                best = (gamma, beta, value);
            }
        }
    }

    // One local pass: golden-section along each coordinate around the best
    // grid cell, keeping whichever point wins.
    let golden = |lo: f64, hi: f64, f: &dyn Fn(f64) -> Result<f64>| -> Result<(f64, f64)> {
        let inv_phi = 0.618_033_988_749_894_9_f64;
        let (mut lo, mut hi) = (lo, hi);
        let mut a = hi - inv_phi * (hi - lo);
        let mut b = lo + inv_phi * (hi - lo);
        let mut fa = f(a)?;
        let mut fb = f(b)?;
        for _ in 0..40 {
            if fa > fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - inv_phi * (hi - lo);
                fa = f(a)?;
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + inv_phi * (hi - lo);
                fb = f(b)?;
            }
        }
        let x = 0.5 * (lo + hi);
        Ok((x, f(x)?))
    };

    let (g0, b0, _) = best;
    let (g1, v1) = golden(g0 - gamma_step, g0 + gamma_step, &|g| eval(g, b0))?;
    if v1 > best.2 {
        best = (g1, b0, v1);
    }
    let (b1, v2) = golden(best.1 - beta_step, best.1 + beta_step, &|b| eval(best.0, b))?;
    if v2 > best.2 {
        best = (best.0, b1, v2);
    }
    Ok(best)
}
