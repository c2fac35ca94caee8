//! Seeded synthetic two-domain trial generator.
//!
//! Each trial is a continuous-time latent event (standing, walking, falling,
//! or lying down) rendered to discrete samples at a requested rate. Rendering
//! the same latent events twice — once unshifted, once through a
//! [`DomainShift`] — yields paired source/target pools sharing ground truth,
//! which is what the cross-domain acceptance experiments need.
//!
//! Fall trials follow the free-fall / impact / rest phenomenology: the norm
//! dips toward ~0.2 g for ~0.3 s, spikes above 3 g at impact, and settles on
//! a ~1 g plateau in the post-fall orientation. ADL trials are walking
//! (gravity plus a low-amplitude sinusoid) or, with probability
//! `confuser_fraction`, a controlled lie-down that mirrors the fall's norm
//! profile and differs only in the horizontal direction of the impact and
//! final posture. Direction is the class signal that a domain rotation
//! disturbs, so a non-zero confuser fraction makes the benchmark sensitive to
//! cross-domain shift.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Class, Position, TrialRecord};
use crate::error::{DafdError, Result};
use crate::rng::stream;

/// Affine sensor-placement change applied to the target domain: a rotation
/// about the vertical axis, per-axis gain, per-axis offset, and an optional
/// sampling-rate override.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainShift {
    pub rotation_rad: f64,
    pub gain: [f64; 3],
    pub offset_g: [f64; 3],
    pub rate_override_hz: Option<f64>,
}

impl DomainShift {
    pub fn identity() -> Self {
        DomainShift {
            rotation_rad: 0.0,
            gain: [1.0, 1.0, 1.0],
            offset_g: [0.0, 0.0, 0.0],
            rate_override_hz: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gain.iter().any(|&g| g == 0.0) {
            return Err(DafdError::InvalidSpec("domain-shift gains must be non-zero".into()));
        }
        if let Some(rate) = self.rate_override_hz {
            if !(rate > 0.0) {
                return Err(DafdError::InvalidSpec(format!(
                    "rate override must be positive, got {rate}"
                )));
            }
        }
        if !self.rotation_rad.is_finite() {
            return Err(DafdError::InvalidSpec("rotation must be finite".into()));
        }
        Ok(())
    }

    fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let (sin, cos) = self.rotation_rad.sin_cos();
        let rotated = [
            v[0] * cos - v[1] * sin,
            v[0] * sin + v[1] * cos,
            v[2],
        ];
        [
            rotated[0] * self.gain[0] + self.offset_g[0],
            rotated[1] * self.gain[1] + self.offset_g[1],
            rotated[2] * self.gain[2] + self.offset_g[2],
        ]
    }
}

impl Default for DomainShift {
    fn default() -> Self {
        DomainShift::identity()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_subjects: usize,
    pub trials_per_class_per_subject: usize,
    pub rate_hz: f64,
    pub domain_shift: DomainShift,
    /// Per-axis Gaussian noise in g.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Fraction of ADL trials rendered as fall-like lie-down confusers
    /// instead of plain walking. 0 keeps every ADL trial a walk.
    pub confuser_fraction: f64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects == 0 {
            return Err(DafdError::InvalidSpec("n_subjects must be positive".into()));
        }
        if self.trials_per_class_per_subject == 0 {
            return Err(DafdError::InvalidSpec(
                "trials_per_class_per_subject must be positive".into(),
            ));
        }
        if !(self.rate_hz > 0.0) {
            return Err(DafdError::InvalidSpec(format!(
                "rate_hz must be positive, got {}",
                self.rate_hz
            )));
        }
        if self.noise_sigma < 0.0 {
            return Err(DafdError::InvalidSpec("noise_sigma must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.confuser_fraction) {
            return Err(DafdError::InvalidSpec(
                "confuser_fraction must be in [0, 1]".into(),
            ));
        }
        self.domain_shift.validate()
    }
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_subjects: 4,
            trials_per_class_per_subject: 3,
            rate_hz: 18.4,
            domain_shift: DomainShift::identity(),
            noise_sigma: 0.03,
            seed: 0,
            confuser_fraction: 0.0,
        }
    }
}

/// A rendered trial together with generator ground truth used by tests.
#[derive(Debug, Clone)]
pub struct SynthTrial {
    pub record: TrialRecord,
    /// Support of the impact spike in seconds, for fall-shaped events.
    pub impact_interval_s: Option<(f64, f64)>,
    pub is_confuser: bool,
}

/// Paired pools rendered from the same latent events: the source at the
/// base placement, the target through the spec's domain shift.
#[derive(Debug, Clone)]
pub struct SynthPair {
    pub source: Vec<TrialRecord>,
    pub target: Vec<TrialRecord>,
}

pub const SOURCE_POSITION: Position = Position::WA;
pub const TARGET_POSITION: Position = Position::RP;

// class-defining azimuths in the horizontal plane, with per-subject and
// per-trial spread; the ring-down oscillates perpendicular to the impact,
// so each axis mixes two temporally distinct components whose within-axis
// ratio encodes the azimuth even after per-axis min-max normalization
const FALL_AZIMUTH_RAD: f64 = -27.5 * PI / 180.0;
const CONFUSER_AZIMUTH_RAD: f64 = 27.5 * PI / 180.0;
const SUBJECT_AZIMUTH_SD_RAD: f64 = 8.0 * PI / 180.0;
const TRIAL_AZIMUTH_SD_RAD: f64 = 5.0 * PI / 180.0;
const RING_DECAY_S: f64 = 0.35;

const SALT_LATENT: u64 = 0x10_0000;
const SALT_NOISE: u64 = 0x20_0000;
const SALT_SUBJECT: u64 = 0x30_0000;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let mut u1: f64 = rng.gen();
    while u1 <= 1e-300 {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Continuous-time description of one latent trial.
#[derive(Debug, Clone)]
enum LatentEvent {
    Walk {
        azimuth: f64,
        amplitude: f64,
        freq_hz: f64,
        phase: f64,
        bob_amplitude: f64,
    },
    /// A fall or a controlled lie-down: stand, drop, impact, rest.
    FallShaped {
        drop_start_s: f64,
        drop_len_s: f64,
        dip_level_g: f64,
        impact_width_s: f64,
        impact_peak_g: f64,
        /// Horizontal azimuth of the impact and of the final posture.
        azimuth: f64,
        lying_z: f64,
        ring_freq_hz: f64,
        ring_amp_g: f64,
    },
}

#[derive(Debug, Clone)]
struct LatentTrial {
    class: Class,
    is_confuser: bool,
    duration_s: f64,
    event: LatentEvent,
}

impl LatentTrial {
    /// Ideal (noise-free, unshifted) accelerometer reading at time `t`.
    fn at(&self, t: f64) -> [f64; 3] {
        match &self.event {
            LatentEvent::Walk {
                azimuth,
                amplitude,
                freq_hz,
                phase,
                bob_amplitude,
            } => {
                let osc = amplitude * (2.0 * PI * freq_hz * t + phase).sin();
                let bob = bob_amplitude * (4.0 * PI * freq_hz * t + 2.0 * phase).sin();
                [azimuth.cos() * osc, azimuth.sin() * osc, 1.0 + bob]
            }
            LatentEvent::FallShaped {
                drop_start_s,
                drop_len_s,
                dip_level_g,
                impact_width_s,
                impact_peak_g,
                azimuth,
                lying_z,
                ring_freq_hz,
                ring_amp_g,
            } => {
                let horizontal = (1.0 - lying_z * lying_z).max(0.0).sqrt();
                let lying = [azimuth.cos() * horizontal, azimuth.sin() * horizontal, *lying_z];
                let impact_dir = [azimuth.cos(), azimuth.sin(), 0.15];
                // body rocks sideways after impact: the ring-down axis is
                // perpendicular to the impact azimuth
                let ring_dir = [-azimuth.sin(), azimuth.cos(), 0.1];
                let drop_end = drop_start_s + drop_len_s;
                let impact_end = drop_end + impact_width_s;
                if t < *drop_start_s {
                    // quiet standing with a light sway
                    let sway = 0.02 * (2.0 * PI * 0.9 * t).sin();
                    [sway, -sway, 1.0]
                } else if t < drop_end {
                    // free fall: support force vanishes
                    let s = smoothstep((t - drop_start_s) / (0.25 * drop_len_s));
                    let level = 1.0 + (dip_level_g - 1.0) * s;
                    [0.0, 0.0, level]
                } else if t < impact_end {
                    // raised-cosine spike on top of a free-fall -> lying blend
                    let u = (t - drop_end) / impact_width_s;
                    let bump = impact_peak_g * (PI * (u - 0.5)).cos().powi(2);
                    let base = smoothstep(u);
                    [
                        lying[0] * base + impact_dir[0] * bump,
                        lying[1] * base + impact_dir[1] * bump,
                        dip_level_g * (1.0 - base) + lying[2] * base + impact_dir[2] * bump,
                    ]
                } else {
                    let dt = t - impact_end;
                    let ring =
                        ring_amp_g * (-dt / RING_DECAY_S).exp() * (2.0 * PI * ring_freq_hz * dt).cos();
                    [
                        lying[0] + ring_dir[0] * ring,
                        lying[1] + ring_dir[1] * ring,
                        lying[2] + ring_dir[2] * ring,
                    ]
                }
            }
        }
    }

    fn impact_interval(&self) -> Option<(f64, f64)> {
        match &self.event {
            LatentEvent::Walk { .. } => None,
            LatentEvent::FallShaped {
                drop_start_s,
                drop_len_s,
                impact_width_s,
                ..
            } => {
                let start = drop_start_s + drop_len_s;
                Some((start, start + impact_width_s))
            }
        }
    }
}

fn draw_latent(
    spec: &SynthSpec,
    subject_azimuth_jitter: f64,
    class: Class,
    rng: &mut ChaCha8Rng,
) -> LatentTrial {
    let is_confuser = class == Class::Adl && rng.gen::<f64>() < spec.confuser_fraction;
    if class == Class::Adl && !is_confuser {
        return LatentTrial {
            class,
            is_confuser,
            duration_s: rng.gen_range(4.5..6.5),
            event: LatentEvent::Walk {
                azimuth: rng.gen_range(0.0..(2.0 * PI)),
                amplitude: rng.gen_range(0.1..0.3),
                freq_hz: rng.gen_range(1.6..2.6),
                phase: rng.gen_range(0.0..(2.0 * PI)),
                bob_amplitude: rng.gen_range(0.05..0.15),
            },
        };
    }
    let center = if class == Class::Fall {
        FALL_AZIMUTH_RAD
    } else {
        CONFUSER_AZIMUTH_RAD
    };
    let azimuth = center
        + subject_azimuth_jitter
        + TRIAL_AZIMUTH_SD_RAD * normal(rng);
    LatentTrial {
        class,
        is_confuser,
        duration_s: rng.gen_range(5.5..7.0),
        event: LatentEvent::FallShaped {
            drop_start_s: rng.gen_range(1.5..2.5),
            drop_len_s: rng.gen_range(0.25..0.35),
            dip_level_g: rng.gen_range(0.12..0.28),
            impact_width_s: rng.gen_range(0.24..0.30),
            impact_peak_g: rng.gen_range(3.8..5.5),
            azimuth,
            lying_z: rng.gen_range(0.1..0.3),
            ring_freq_hz: rng.gen_range(2.5..4.0),
            ring_amp_g: rng.gen_range(0.8..1.6),
        },
    }
}

fn render(
    latent: &LatentTrial,
    shift: &DomainShift,
    rate_hz: f64,
    noise_sigma: f64,
    noise_rng: &mut ChaCha8Rng,
) -> Vec<[f64; 3]> {
    let n = (latent.duration_s * rate_hz).floor() as usize + 1;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 / rate_hz;
        let mut v = shift.apply(latent.at(t));
        if noise_sigma > 0.0 {
            for axis in &mut v {
                *axis += noise_sigma * normal(noise_rng);
            }
        }
        samples.push(v);
    }
    samples
}

fn generate(spec: &SynthSpec, shift: &DomainShift, position: Position) -> Result<Vec<SynthTrial>> {
    spec.validate()?;
    shift.validate()?;
    let rate = shift.rate_override_hz.unwrap_or(spec.rate_hz);
    let mut out = Vec::new();
    let mut global_idx: u64 = 0;
    for subject in 0..spec.n_subjects {
        let subject_id = format!("S{:02}", subject + 1);
        let mut subject_rng = stream(spec.seed, SALT_SUBJECT + subject as u64);
        let subject_jitter = SUBJECT_AZIMUTH_SD_RAD * normal(&mut subject_rng);
        for class in [Class::Adl, Class::Fall] {
            for k in 0..spec.trials_per_class_per_subject {
                let mut latent_rng = stream(spec.seed, SALT_LATENT + global_idx);
                let latent = draw_latent(spec, subject_jitter, class, &mut latent_rng);
                let mut noise_rng = stream(spec.seed, SALT_NOISE + global_idx);
                let samples = render(&latent, shift, rate, spec.noise_sigma, &mut noise_rng);
                let activity_code = match (&latent.class, latent.is_confuser) {
                    (Class::Fall, _) => "F1".to_string(),
                    (Class::Adl, false) => "A1".to_string(),
                    (Class::Adl, true) => "A2".to_string(),
                };
                let trial_id =
                    format!("{}-{}-T{:02}-{}", subject_id, activity_code, k + 1, position);
                out.push(SynthTrial {
                    record: TrialRecord {
                        trial_id,
                        subject_id: subject_id.clone(),
                        dataset_id: "synth".to_string(),
                        position,
                        activity_code,
                        label: latent.class,
                        sample_rate_hz: rate,
                        samples,
                    },
                    impact_interval_s: latent.impact_interval(),
                    is_confuser: latent.is_confuser,
                });
                global_idx += 1;
            }
        }
    }
    Ok(out)
}

/// Renders one domain's trials (the spec's own domain shift applied),
/// including the generator's ground-truth event timing for verification.
pub fn synth_trials_detailed(spec: &SynthSpec) -> Result<Vec<SynthTrial>> {
    generate(spec, &spec.domain_shift, SOURCE_POSITION)
}

/// Deterministic synthetic trials for one domain: `n_subjects x
/// trials_per_class_per_subject` trials per class, spec's domain shift applied.
pub fn synth_trials(spec: &SynthSpec) -> Result<Vec<TrialRecord>> {
    Ok(synth_trials_detailed(spec)?
        .into_iter()
        .map(|t| t.record)
        .collect())
}

/// Renders the same latent events twice: unshifted at the waist (source) and
/// through the spec's domain shift at the right pocket (target).
pub fn synth_domain_pair(spec: &SynthSpec) -> Result<SynthPair> {
    let source = generate(spec, &DomainShift::identity(), SOURCE_POSITION)?
        .into_iter()
        .map(|t| t.record)
        .collect();
    let target = generate(spec, &spec.domain_shift, TARGET_POSITION)?
        .into_iter()
        .map(|t| t.record)
        .collect();
    Ok(SynthPair { source, target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::norm_xyz;

    fn spec() -> SynthSpec {
        SynthSpec {
            n_subjects: 2,
            trials_per_class_per_subject: 3,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let a = synth_trials(&spec()).unwrap();
        let b = synth_trials(&spec()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.trial_id, y.trial_id);
            assert_eq!(x.samples.len(), y.samples.len());
            for (sa, sb) in x.samples.iter().zip(&y.samples) {
                for i in 0..3 {
                    assert_eq!(sa[i].to_bits(), sb[i].to_bits());
                }
            }
        }
    }

    #[test]
    fn counts_follow_the_spec() {
        let trials = synth_trials(&spec()).unwrap();
        assert_eq!(trials.len(), 12);
        assert_eq!(trials.iter().filter(|t| t.label == Class::Fall).count(), 6);
    }

    #[test]
    fn fall_norm_argmax_lies_in_the_impact_interval() {
        let mut s = spec();
        s.n_subjects = 4;
        s.trials_per_class_per_subject = 4;
        for trial in synth_trials_detailed(&s).unwrap() {
            let Some((start, end)) = trial.impact_interval_s else {
                assert_eq!(trial.record.label, Class::Adl);
                continue;
            };
            let rate = trial.record.sample_rate_hz;
            let argmax = trial
                .record
                .samples
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| {
                    norm_xyz(**a)
                        .partial_cmp(&norm_xyz(**b))
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            let t = argmax as f64 / rate;
            assert!(
                t >= start && t <= end,
                "trial {}: argmax at {t:.3}s outside impact [{start:.3}, {end:.3}]",
                trial.record.trial_id
            );
        }
    }

    #[test]
    fn fall_trials_have_dip_spike_and_plateau() {
        let trials = synth_trials_detailed(&spec()).unwrap();
        for trial in trials.iter().filter(|t| t.record.label == Class::Fall) {
            let norms: Vec<f64> = trial.record.samples.iter().map(|s| norm_xyz(*s)).collect();
            let spike = norms.iter().cloned().fold(0.0, f64::max);
            assert!(spike >= 3.0, "no impact spike: max norm {spike}");
            let dip = norms
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(dip < 0.5, "no free-fall dip: min norm {dip}");
            // post-impact rest plateau near 1 g
            let tail = &norms[norms.len() - 5..];
            for v in tail {
                assert!((v - 1.0).abs() < 0.4, "plateau norm {v}");
            }
        }
    }

    #[test]
    fn identity_shift_pair_is_identical() {
        let pair = synth_domain_pair(&spec()).unwrap();
        for (s, t) in pair.source.iter().zip(&pair.target) {
            assert_eq!(s.subject_id, t.subject_id);
            assert_eq!(s.label, t.label);
            for (sa, sb) in s.samples.iter().zip(&t.samples) {
                for i in 0..3 {
                    assert_eq!(sa[i].to_bits(), sb[i].to_bits());
                }
            }
        }
    }

    #[test]
    fn rotation_changes_target_but_keeps_source() {
        let mut s = spec();
        s.domain_shift.rotation_rad = 25.0 * PI / 180.0;
        let base = synth_domain_pair(&spec()).unwrap();
        let shifted = synth_domain_pair(&s).unwrap();
        assert_eq!(base.source[0].samples, shifted.source[0].samples);
        assert_ne!(base.target[0].samples, shifted.target[0].samples);
    }

    #[test]
    fn rate_override_changes_sample_count() {
        let mut s = spec();
        s.domain_shift.rate_override_hz = Some(200.0);
        let pair = synth_domain_pair(&s).unwrap();
        assert_eq!(pair.target[0].sample_rate_hz, 200.0);
        assert!(pair.target[0].samples.len() > 5 * pair.source[0].samples.len());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = spec();
        s.domain_shift.gain = [0.0, 1.0, 1.0];
        assert!(synth_trials(&s).is_err());
        let mut s = spec();
        s.n_subjects = 0;
        assert!(synth_trials(&s).is_err());
        let mut s = spec();
        s.domain_shift.rate_override_hz = Some(0.0);
        assert!(synth_trials(&s).is_err());
    }
}
