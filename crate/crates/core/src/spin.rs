//! Physical spin system model and pulse-sequence propagators.
//!
//! Pulses are treated as instantaneous ideal rotations (hard-pulse
//! approximation); offsets and J coupling act only during delays. The
//! free-evolution Hamiltonian in the doubly rotating frame is
//!
//!   H = sum_i 2 pi off_i Iz_i + sum_{i<j} 2 pi J_ij Iz_i Iz_j
//!
//! and a delay of t contributes exp(-i H t). A sequence lists events in
//! time order, and its propagator multiplies the event propagators with
//! the FIRST event RIGHTMOST, so the first pulse acts first.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::quantum::{check_spin_count, embed, rotation, SpinAxis, UnitaryOperator};
use crate::Result;

/// Per-channel RF calibration: nominal power and the duration of a pi/2
/// pulse at that power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub power_db: f64,
    pub t90_s: f64,
}

/// One spin of the system: a label, the spectrometer channel driving it,
/// and its frequency offset in the rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin {
    pub name: String,
    pub channel: u32,
    pub offset_hz: f64,
}

/// Spin names, channel assignments, J-coupling table and pulse calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    spins: Vec<Spin>,
    couplings: BTreeMap<(usize, usize), f64>,
    calibrations: BTreeMap<u32, Calibration>,
}

impl SpinSystem {
    /// Channels must be unique per spin.
    pub fn new(spins: Vec<Spin>) -> Result<Self> {
        check_spin_count(spins.len())?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &spins {
            if !seen.insert(s.channel) {
                return Err(Error::DuplicateChannel(s.channel));
            }
        }
        Ok(SpinSystem {
            spins,
            couplings: BTreeMap::new(),
            calibrations: BTreeMap::new(),
        })
    }

    pub fn with_coupling(mut self, i: usize, j: usize, j_hz: f64) -> Result<Self> {
        let n = self.spins.len();
        if i >= n {
            return Err(Error::SpinOutOfRange { spin: i, nspins: n });
        }
        if j >= n {
            return Err(Error::SpinOutOfRange { spin: j, nspins: n });
        }
        if i == j {
            return Err(Error::ControlEqualsTarget(i));
        }
        if !(j_hz > 0.0) || !j_hz.is_finite() {
            return Err(Error::NonpositiveCoupling(j_hz));
        }
        self.couplings.insert((i.min(j), i.max(j)), j_hz);
        Ok(self)
    }

    pub fn with_calibration(mut self, channel: u32, cal: Calibration) -> Result<Self> {
        if !(cal.t90_s > 0.0) || !cal.t90_s.is_finite() {
            return Err(Error::InvalidDuration(cal.t90_s));
        }
        self.calibrations.insert(channel, cal);
        Ok(self)
    }

    /// The 13C-labelled chloroform two-spin system used throughout: 1H on
    /// channel 1 and 13C on channel 2, both on resonance, J = 215 Hz,
    /// t90 = 9.5 us / 12.6 us at +3.00 dB / -3.00 dB.
    pub fn chloroform() -> Self {
        SpinSystem::new(vec![
            Spin {
                name: "1H".into(),
                channel: 1,
                offset_hz: 0.0,
            },
            Spin {
                name: "13C".into(),
                channel: 2,
                offset_hz: 0.0,
            },
        ])
        .and_then(|s| s.with_coupling(0, 1, 215.0))
        .and_then(|s| {
            s.with_calibration(
                1,
                Calibration {
                    power_db: 3.00,
                    t90_s: 9.5e-6,
                },
            )
        })
        .and_then(|s| {
            s.with_calibration(
                2,
                Calibration {
                    power_db: -3.00,
                    t90_s: 12.6e-6,
                },
            )
        })
        .expect("chloroform constants are valid")
    }

    /// Synthetic n-spin system with every pair coupled at the same J;
    /// stands in for hardware when routing more than two ports in pulse
    /// mode.
    pub fn uniformly_coupled(nspins: usize, j_hz: f64) -> Result<Self> {
        let spins = (0..nspins)
            .map(|i| Spin {
                name: format!("S{i}"),
                channel: (i + 1) as u32,
                offset_hz: 0.0,
            })
            .collect();
        let mut sys = SpinSystem::new(spins)?;
        for i in 0..nspins {
            for j in (i + 1)..nspins {
                sys = sys.with_coupling(i, j, j_hz)?;
            }
            sys = sys.with_calibration(
                (i + 1) as u32,
                Calibration {
                    power_db: 0.0,
                    t90_s: 10.0e-6,
                },
            )?;
        }
        Ok(sys)
    }

    pub fn spin_count(&self) -> usize {
        self.spins.len()
    }

    pub fn spin(&self, index: usize) -> Result<&Spin> {
        self.spins.get(index).ok_or(Error::SpinOutOfRange {
            spin: index,
            nspins: self.spins.len(),
        })
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        self.couplings.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn calibration(&self, channel: u32) -> Result<&Calibration> {
        self.calibrations
            .get(&channel)
            .ok_or(Error::UnknownChannel(channel))
    }

    /// Duration of a pulse of tipping angle `theta` on a channel, at that
    /// channel's calibrated power: t90 * theta / (pi/2).
    pub fn angle_to_duration(&self, channel: u32, theta: f64) -> Result<f64> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::NonpositiveAngle(theta));
        }
        let cal = self.calibration(channel)?;
        Ok(cal.t90_s * theta / (PI / 2.0))
    }

    /// Phase picked up by each basis state per second of free evolution;
    /// the delay propagator's diagonal is exp(-i rate t). Shared with the
    /// acquisition module so FID evolution and delays agree by
    /// construction.
    pub(crate) fn basis_phase_rates(&self) -> Vec<f64> {
        let n = self.spins.len();
        let dim = 1usize << n;
        // Iz eigenvalue: +1/2 for |0>, -1/2 for |1>; spin 0 is the MSB.
        let z = |index: usize, spin: usize| -> f64 {
            if index & (1 << (n - 1 - spin)) == 0 {
                0.5
            } else {
                -0.5
            }
        };
        (0..dim)
            .map(|b| {
                let mut rate = 0.0;
                for (i, s) in self.spins.iter().enumerate() {
                    rate += 2.0 * PI * s.offset_hz * z(b, i);
                }
                for (&(i, j), &j_hz) in &self.couplings {
                    rate += 2.0 * PI * j_hz * z(b, i) * z(b, j);
                }
                rate
            })
            .collect()
    }

    /// Propagator of one hard pulse: the rotation embedded on its spin.
    pub fn pulse_propagator(&self, event: &PulseEvent) -> Result<UnitaryOperator> {
        let n = self.spins.len();
        if event.spin >= n {
            return Err(Error::SpinOutOfRange {
                spin: event.spin,
                nspins: n,
            });
        }
        embed(&rotation(event.axis, event.angle), event.spin, n)
    }

    /// Propagator of free evolution for `duration_s` seconds.
    pub fn delay_propagator(&self, duration_s: f64) -> Result<UnitaryOperator> {
        if !(duration_s >= 0.0) || !duration_s.is_finite() {
            return Err(Error::InvalidDuration(duration_s));
        }
        let diag: Vec<Complex64> = self
            .basis_phase_rates()
            .iter()
            .map(|rate| Complex64::from_polar(1.0, -rate * duration_s))
            .collect();
        Ok(UnitaryOperator::from_trusted(ComplexMatrix::from_diagonal(
            &diag,
        )))
    }

    /// Net propagator of a whole sequence: time-ordered product with the
    /// first event applied first.
    pub fn sequence_propagator(&self, seq: &PulseSequence) -> Result<UnitaryOperator> {
        let n = self.spins.len();
        let mut u = UnitaryOperator::identity(1 << n)?;
        for event in seq.events() {
            let step = match event {
                SequenceEvent::Pulse(p) => self.pulse_propagator(p)?,
                SequenceEvent::Delay(d) => self.delay_propagator(d.duration_s)?,
            };
            u = step.mul(&u)?;
        }
        Ok(u)
    }

    /// Total wall time of a sequence: calibrated pulse durations plus
    /// delays.
    pub fn sequence_duration(&self, seq: &PulseSequence) -> Result<f64> {
        let mut total = 0.0;
        for event in seq.events() {
            match event {
                SequenceEvent::Pulse(p) => {
                    let channel = self.spin(p.spin)?.channel;
                    total += self.angle_to_duration(channel, p.angle)?;
                }
                SequenceEvent::Delay(d) => total += d.duration_s,
            }
        }
        Ok(total)
    }
}

/// Delay realizing coupling angle `phi` in the 2 Iz Sz product-operator
/// term: tau = phi / (pi J). At phi = pi/2 this is exactly 1/(2J).
pub fn coupling_delay(j_hz: f64, phi: f64) -> Result<f64> {
    if !(j_hz > 0.0) || !j_hz.is_finite() {
        return Err(Error::NonpositiveCoupling(j_hz));
    }
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::NonpositiveAngle(phi));
    }
    Ok(phi / (PI * j_hz))
}

/// One hard RF pulse: spin, transverse axis, tipping angle in (0, 2 pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvent {
    spin: usize,
    axis: SpinAxis,
    angle: f64,
}

impl PulseEvent {
    pub fn new(spin: usize, axis: SpinAxis, angle: f64) -> Result<Self> {
        if !axis.is_transverse() {
            return Err(Error::NonTransverseAxis(axis.to_string()));
        }
        if !(angle > 0.0 && angle <= 2.0 * PI) {
            return Err(Error::InvalidPulseAngle(angle));
        }
        Ok(PulseEvent { spin, axis, angle })
    }

    pub fn spin(&self) -> usize {
        self.spin
    }

    pub fn axis(&self) -> SpinAxis {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Free evolution for a nonnegative duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEvent {
    duration_s: f64,
}

impl DelayEvent {
    pub fn new(duration_s: f64) -> Result<Self> {
        if !(duration_s >= 0.0) || !duration_s.is_finite() {
            return Err(Error::InvalidDuration(duration_s));
        }
        Ok(DelayEvent { duration_s })
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceEvent {
    Pulse(PulseEvent),
    Delay(DelayEvent),
}

/// Time-ordered list of pulses and delays.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PulseSequence {
    events: Vec<SequenceEvent>,
}

impl PulseSequence {
    pub fn new() -> Self {
        PulseSequence::default()
    }

    pub fn push_pulse(&mut self, p: PulseEvent) {
        self.events.push(SequenceEvent::Pulse(p));
    }

    pub fn push_delay(&mut self, d: DelayEvent) {
        self.events.push(SequenceEvent::Delay(d));
    }

    /// Appends all of `other` after the events already present.
    pub fn concat(&mut self, other: PulseSequence) {
        self.events.extend(other.events);
    }

    pub fn events(&self) -> &[SequenceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn pulse_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, SequenceEvent::Pulse(_)))
            .count()
    }

    pub fn delay_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, SequenceEvent::Delay(_)))
            .count()
    }

    /// Largest spin index mentioned, if any.
    pub fn max_spin(&self) -> Option<usize> {
        self.events
            .iter()
            .filter_map(|e| match e {
                SequenceEvent::Pulse(p) => Some(p.spin),
                SequenceEvent::Delay(_) => None,
            })
            .max()
    }

    /// Line-oriented text form: `P <spin> <axis> <angle_rad>` per pulse,
    /// `D <seconds>` per delay. Round-trips losslessly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            match event {
                SequenceEvent::Pulse(p) => {
                    out.push_str(&format!("P {} {} {}\n", p.spin, p.axis, p.angle));
                }
                SequenceEvent::Delay(d) => {
                    out.push_str(&format!("D {}\n", d.duration_s));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seq = PulseSequence::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "P" => {
                    if fields.len() != 4 {
                        return Err(Error::parse(lineno, "expected `P <spin> <axis> <angle>`"));
                    }
                    let spin: usize = fields[1]
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad spin index"))?;
                    let axis: SpinAxis = fields[2]
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad axis `{}`", fields[2])))?;
                    let angle: f64 = fields[3]
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad angle"))?;
                    let pulse = PulseEvent::new(spin, axis, angle)
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                    seq.push_pulse(pulse);
                }
                "D" => {
                    if fields.len() != 2 {
                        return Err(Error::parse(lineno, "expected `D <seconds>`"));
                    }
                    let duration: f64 = fields[1]
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad duration"))?;
                    let delay = DelayEvent::new(duration)
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                    seq.push_delay(delay);
                }
                other => {
                    return Err(Error::parse(lineno, format!("unknown event `{other}`")));
                }
            }
        }
        Ok(seq)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
