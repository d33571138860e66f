// SPDX-License-Identifier: Apache-2.0

//! Single realizations and the deterministic parallel reduction.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Model;
use crate::qops::{hermitian_part, CMatrix, Hamiltonian, KrausChannel, MAX_DIM};

/// Realizations reduced sequentially inside one parallel work item.
pub const CHUNK_SIZE: usize = 256;

/// Model operators expressed in the eigenbasis of `H`, where the free flow
/// multiplies matrix elements by phases.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    energies: Vec<f64>,
    basis: CMatrix,
    kraus: Vec<CMatrix>,
    kraus_adjoint: Vec<CMatrix>,
    flat: bool,
}

impl Frame {
    pub(crate) fn new(h: &Hamiltonian, channel: &KrausChannel) -> Self {
        let eig = hermitian_part(h.matrix()).symmetric_eigen();
        let energies: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let basis = eig.eigenvectors;
        let kraus: Vec<CMatrix> = channel
            .operators()
            .iter()
            .map(|k| basis.adjoint() * k * &basis)
            .collect();
        let kraus_adjoint = kraus.iter().map(|k| k.adjoint()).collect();
        let spread = energies.iter().fold(0.0f64, |m, e| m.max((e - energies[0]).abs()));
        Self {
            energies,
            basis,
            kraus,
            kraus_adjoint,
            flat: spread == 0.0,
        }
    }

    pub(crate) fn enter(&self, x: &CMatrix) -> CMatrix {
        self.basis.adjoint() * x * &self.basis
    }

    pub(crate) fn leave(&self, x: &CMatrix) -> CMatrix {
        &self.basis * x * self.basis.adjoint()
    }

    /// `X ↦ e^{−iHdt} X e^{iHdt}`, or the Heisenberg direction when `dual`.
    pub(crate) fn flow(&self, x: &mut CMatrix, dt: f64, dual: bool) {
        if self.flat || dt == 0.0 {
            return;
        }
        let d = self.energies.len();
        let sign = if dual { 1.0 } else { -1.0 };
        let mut phase = [Complex64::new(1.0, 0.0); MAX_DIM];
        for (p, e) in phase.iter_mut().zip(&self.energies) {
            *p = Complex64::from_polar(1.0, sign * e * dt);
        }
        for j in 0..d {
            let pj = phase[j].conj();
            for i in 0..d {
                x[(i, j)] *= phase[i] * pj;
            }
        }
    }

    /// `X ↦ Σ C X C†`.
    pub(crate) fn event(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for (k, ka) in self.kraus.iter().zip(&self.kraus_adjoint) {
            out += k * x * ka;
        }
        out
    }

    /// `A ↦ Σ C† A C`.
    pub(crate) fn event_dual(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(a.nrows(), a.ncols());
        for (k, ka) in self.kraus.iter().zip(&self.kraus_adjoint) {
            out += ka * a * k;
        }
        out
    }
}

/// One realization: free flow between renewal events, the channel at each
/// event. The state is any operator, so linear combinations of states can
/// be propagated directly.
#[derive(Debug, Clone)]
pub struct Trajectory<'a> {
    model: &'a Model,
    state: CMatrix,
    now: f64,
    next_event: f64,
    events: usize,
}

impl<'a> Trajectory<'a> {
    /// Starts at time 0 right after an event, with `initial` given in the
    /// laboratory basis.
    pub fn new(model: &'a Model, initial: &CMatrix, rng: &mut dyn RngCore) -> Self {
        let next_event = model.waiting().sample(rng);
        Self {
            model,
            state: model.frame().enter(initial),
            now: 0.0,
            next_event,
            events: 0,
        }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    /// Number of events so far.
    pub fn events(&self) -> usize {
        self.events
    }

    /// Absolute time of the next scheduled event.
    pub fn next_event(&self) -> f64 {
        self.next_event
    }

    /// Current operator in the laboratory basis.
    pub fn state(&self) -> CMatrix {
        self.model.frame().leave(&self.state)
    }

    pub(crate) fn frame_state(&self) -> &CMatrix {
        &self.state
    }

    /// Replaces the operator without touching the event clock.
    pub fn replace_state(&mut self, x: &CMatrix) {
        self.state = self.model.frame().enter(x);
    }

    /// Runs to `until`, applying every event on the way in order.
    pub fn advance(&mut self, until: f64, rng: &mut dyn RngCore) {
        debug_assert!(until >= self.now);
        let frame = self.model.frame();
        while self.next_event <= until {
            frame.flow(&mut self.state, self.next_event - self.now, false);
            self.state = frame.event(&self.state);
            self.now = self.next_event;
            self.events += 1;
            self.next_event += self.model.waiting().sample(rng);
        }
        frame.flow(&mut self.state, until - self.now, false);
        self.now = until;
    }
}

/// Running mean and centred second moment of a vector of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(width: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; width],
            m2: vec![0.0; width],
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Standard error of each mean; zero for fewer than two samples.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.m2
            .iter()
            .map(|s| if self.count > 1 { (s / (n - 1.0) / n).sqrt() } else { 0.0 })
            .collect()
    }
}

/// Generator of realization `index` under the master `seed`.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Averages `realize` over `realizations` independent draws.
///
/// Realization `i` always sees the same random stream and chunks are merged
/// in index order, so the result is bit-identical for any worker count.
pub fn run_realizations<F>(realizations: usize, seed: u64, width: usize, realize: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let chunks = realizations.div_ceil(CHUNK_SIZE);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::new(width);
            let mut buf = vec![0.0; width];
            for i in c * CHUNK_SIZE..realizations.min((c + 1) * CHUNK_SIZE) {
                let mut rng = realization_rng(seed, i as u64);
                realize(&mut rng, &mut buf);
                acc.push(&buf);
            }
            acc
        })
        .collect();
    parts.iter().fold(Moments::new(width), |mut acc, part| {
        acc.merge(part);
        acc
    })
}
