use std::collections::BTreeMap;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::{Result, SimConfig, SimError};
use crate::View;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Arrival,
    Departure { user: u64 },
    /// A fault cut the user's service short.
    ErrorExit { user: u64 },
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Arrival => "arrival",
            EventKind::Departure { .. } => "departure",
            EventKind::ErrorExit { .. } => "error",
        }
    }
}

/// An admitted user. `seed` drives the user's own service and fault draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserRef {
    pub id: u64,
    pub view: View,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub arrivals: u64,
    pub admitted: u64,
    pub rejected: u64,
    pub departed: u64,
    pub errors: u64,
    pub truncated_service: u64,
    pub errors_by_view: [u64; 3],
}

/// Sums of the drawn variates, for calibration checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub interarrival_sum: f64,
    pub interarrival_count: u64,
    pub service_sum: f64,
    pub service_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub clock: f64,
    pub kind: EventKind,
    /// Users in system after the event was handled.
    pub queue_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_index: u64,
    /// Faults observed during the run.
    pub defect_density: u64,
    pub arrivals: u64,
    pub admitted: u64,
    pub rejected: u64,
    /// Simulated seconds until the system drained.
    pub duration: f64,
}

/// Pending events keyed by (time bits, insertion sequence). Times are
/// non-negative, so the IEEE bit pattern orders like the value.
type EventQueue = BTreeMap<(u64, u64), EventKind>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub clock: f64,
    pub queue_size: usize,
    pub counters: Counters,
    pub stats: SimStats,
    pub run_index: u64,
    events: EventQueue,
    seq: u64,
    arrivals_scheduled: usize,
    next_user: u64,
    rng: ChaCha8Rng,
}

/// `1/(n+1)` for a system holding `queue_size` users, 0 at capacity.
pub fn admission_probability(queue_size: usize, capacity: usize) -> f64 {
    if queue_size >= capacity {
        0.0
    } else {
        1.0 / (queue_size as f64 + 1.0)
    }
}

pub fn init_run(cfg: &SimConfig, run_index: u64) -> SimState {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run_index);
    let mut state = SimState {
        clock: 0.0,
        queue_size: 0,
        counters: Counters::default(),
        stats: SimStats::default(),
        run_index,
        events: EventQueue::new(),
        seq: 0,
        arrivals_scheduled: 0,
        next_user: 0,
        rng,
    };
    if cfg.events_per_run > 0 {
        state.schedule_arrival(cfg);
    }
    state
}

impl SimState {
    pub fn pending_events(&self) -> usize {
        self.events.len()
    }

    pub fn next_event(&self) -> Option<(f64, EventKind)> {
        self.events.first_key_value().map(|(k, v)| (f64::from_bits(k.0), *v))
    }

    fn push_event(&mut self, time: f64, kind: EventKind) {
        debug_assert!(time >= 0.0);
        self.events.insert((time.to_bits(), self.seq), kind);
        self.seq += 1;
    }

    fn pop_event(&mut self) -> Result<(f64, EventKind)> {
        let ((bits, _), kind) = self
            .events
            .pop_first()
            .ok_or_else(|| SimError::InvariantBreach("no pending event".into()))?;
        let time = f64::from_bits(bits);
        if time < self.clock {
            return Err(SimError::InvariantBreach(format!("event at {time} precedes clock {}", self.clock)));
        }
        self.clock = time;
        Ok((time, kind))
    }

    fn schedule_arrival(&mut self, cfg: &SimConfig) {
        let gap = Exp::new(1.0 / cfg.interarrival_mean).expect("validated mean").sample(&mut self.rng);
        self.stats.interarrival_sum += gap;
        self.stats.interarrival_count += 1;
        self.arrivals_scheduled += 1;
        self.push_event(self.clock + gap, EventKind::Arrival);
    }

    /// Handle the next event, which must be an arrival. Returns the admitted
    /// user, if any.
    pub fn arrive(&mut self, cfg: &SimConfig) -> Result<Option<UserRef>> {
        match self.next_event() {
            Some((_, EventKind::Arrival)) => {}
            other => return Err(SimError::InvariantBreach(format!("expected an arrival, found {other:?}"))),
        }
        self.pop_event()?;
        self.counters.arrivals += 1;
        if self.arrivals_scheduled < cfg.events_per_run {
            self.schedule_arrival(cfg);
        }
        // drawn unconditionally so every arrival consumes the same variates
        let u: f64 = self.rng.random();
        let user_seed: u64 = self.rng.random();
        let view = cfg.view_mix.sample(&mut self.rng);

        if u < admission_probability(self.queue_size, cfg.capacity) {
            let user = UserRef { id: self.next_user, view, seed: user_seed };
            self.next_user += 1;
            self.queue_size += 1;
            self.counters.admitted += 1;
            self.add_departure(cfg, user);
            Ok(Some(user))
        } else {
            self.counters.rejected += 1;
            Ok(None)
        }
    }

    /// Schedule the end of an admitted user's stay: a normal departure after
    /// its service time, or an error exit at a uniform point within it.
    pub fn add_departure(&mut self, cfg: &SimConfig, user: UserRef) {
        let mut rng = ChaCha8Rng::seed_from_u64(user.seed);
        let normal = Normal::new(cfg.service_mean, cfg.service_std).expect("validated service parameters");
        let mut t = normal.sample(&mut rng);
        if t < cfg.min_service_time {
            debug!("run {}: service draw {t:.4}s truncated to {}s", self.run_index, cfg.min_service_time);
            self.counters.truncated_service += 1;
            t = cfg.min_service_time;
        }
        self.stats.service_sum += t;
        self.stats.service_count += 1;
        let fault: f64 = rng.random();
        let at: f64 = rng.random();
        if fault < cfg.fault_probability {
            self.counters.errors_by_view[view_slot(user.view)] += 1;
            self.push_event(self.clock + at * t, EventKind::ErrorExit { user: user.id });
        } else {
            self.push_event(self.clock + t, EventKind::Departure { user: user.id });
        }
    }

    /// Handle the next event, which must be a departure or error exit.
    pub fn departure(&mut self) -> Result<()> {
        let (_, kind) = match self.next_event() {
            Some((_, EventKind::Arrival)) | None => {
                return Err(SimError::InvariantBreach("expected a departure".into()));
            }
            Some(_) => self.pop_event()?,
        };
        if self.queue_size == 0 {
            return Err(SimError::InvariantBreach(format!(
                "departure at {} with an empty system (run {})",
                self.clock, self.run_index
            )));
        }
        self.queue_size -= 1;
        self.counters.departed += 1;
        if let EventKind::ErrorExit { .. } = kind {
            self.counters.errors += 1;
        }
        Ok(())
    }

    /// Handle the next pending event, if any.
    pub fn step(&mut self, cfg: &SimConfig) -> Result<Option<TraceEvent>> {
        let Some((_, kind)) = self.next_event() else {
            return Ok(None);
        };
        match kind {
            EventKind::Arrival => {
                self.arrive(cfg)?;
            }
            _ => self.departure()?,
        }
        if self.queue_size > cfg.capacity {
            return Err(SimError::InvariantBreach(format!("queue size {} above capacity", self.queue_size)));
        }
        Ok(Some(TraceEvent { clock: self.clock, kind, queue_size: self.queue_size }))
    }

    pub fn run_to_end(&mut self, cfg: &SimConfig, mut on_event: impl FnMut(&TraceEvent)) -> Result<RunResult> {
        while let Some(ev) = self.step(cfg)? {
            on_event(&ev);
        }
        Ok(self.result())
    }

    pub fn result(&self) -> RunResult {
        RunResult {
            run_index: self.run_index,
            defect_density: self.counters.errors,
            arrivals: self.counters.arrivals,
            admitted: self.counters.admitted,
            rejected: self.counters.rejected,
            duration: self.clock,
        }
    }
}

fn view_slot(view: View) -> usize {
    match view {
        View::Professor => 0,
        View::Student => 1,
        View::Public => 2,
    }
}

pub fn run_single(cfg: &SimConfig, run_index: u64) -> Result<RunResult> {
    init_run(cfg, run_index).run_to_end(cfg, |_| {})
}

pub fn run_single_traced(cfg: &SimConfig, run_index: u64, on_event: impl FnMut(&TraceEvent)) -> Result<RunResult> {
    init_run(cfg, run_index).run_to_end(cfg, on_event)
}
