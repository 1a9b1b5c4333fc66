//! Quantum-switch model of the experiment.
//!
//! Bob holds `B`, the switch control is `C` and the target is `T`. Each Alice
//! measures the target in the computational basis and re-prepares `|x⟩`. The
//! control selects the order: `|0⟩_C` (horizontal polarization) lets Alice 1
//! act first, `|1⟩_C` lets Alice 2 act first. Measurement outcome 0 always
//! corresponds to the +1 eigenvalue of the measured observable.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Outcome, Settings, NUM_CELLS};
use crate::error::{Error, Result};
use crate::linalg::{
    conjugate_apply, projectors_of, tensor, validate_kraus, BinaryObservable, ComplexMatrix,
    DensityMatrix, Subsystem, SubsystemLayout, C64,
};

/// A two-outcome-or-more instrument on the target qubit, with its input baked in.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    input: u8,
    /// `outcomes[a]` is the Kraus family for outcome `a`.
    outcomes: Vec<Vec<ComplexMatrix>>,
}

impl Instrument {
    pub fn new(input: u8, outcomes: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let all: Vec<ComplexMatrix> = outcomes.iter().flatten().cloned().collect();
        let check = validate_kraus(&all);
        if !check.complete {
            return Err(Error::Validation(format!(
                "instrument is not Kraus-complete (deviation {:e})",
                check.max_deviation
            )));
        }
        Ok(Self { input, outcomes })
    }

    /// Single-outcome identity channel.
    pub fn identity() -> Self {
        Self {
            input: 0,
            outcomes: vec![vec![ComplexMatrix::identity(2)]],
        }
    }

    pub fn input(&self) -> u8 {
        self.input
    }

    pub fn outcomes(&self) -> &[Vec<ComplexMatrix>] {
        &self.outcomes
    }

    fn dim(&self) -> usize {
        self.outcomes[0][0].cols()
    }
}

/// Computational-basis measurement followed by re-preparation of `|x⟩`:
/// outcome `a` has the single Kraus operator `|x⟩⟨a|`.
pub fn measure_reprepare(x: u8) -> Result<Instrument> {
    if x > 1 {
        return Err(Error::Validation(format!(
            "instrument input must be a bit, got {x}"
        )));
    }
    let x = x as usize;
    Instrument::new(
        x as u8,
        vec![
            vec![ComplexMatrix::ket_bra(x, 0, 2)],
            vec![ComplexMatrix::ket_bra(x, 1, 2)],
        ],
    )
}

/// Switch Kraus operators for one joint outcome `(a1, a2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchBranch {
    pub a1: usize,
    pub a2: usize,
    /// Operators on `C ⊗ T`.
    pub kraus: Vec<ComplexMatrix>,
}

/// `W = |0⟩⟨0|_C ⊗ K2·K1 + |1⟩⟨1|_C ⊗ K1·K2` for every pair of Kraus operators.
pub fn switch_kraus(first: &Instrument, second: &Instrument) -> Result<Vec<SwitchBranch>> {
    if first.dim() != second.dim() {
        return Err(Error::dims(
            format!("target dimension {}", first.dim()),
            second.dim(),
        ));
    }
    let p0 = ComplexMatrix::ket_bra(0, 0, 2);
    let p1 = ComplexMatrix::ket_bra(1, 1, 2);
    let mut branches = Vec::new();
    for (a1, fam1) in first.outcomes.iter().enumerate() {
        for (a2, fam2) in second.outcomes.iter().enumerate() {
            let mut kraus = Vec::with_capacity(fam1.len() * fam2.len());
            for k1 in fam1 {
                for k2 in fam2 {
                    let one_then_two = tensor(&p0, &k2.matmul(k1)?);
                    let two_then_one = tensor(&p1, &k1.matmul(k2)?);
                    kraus.push(one_then_two.add(&two_then_one)?);
                }
            }
            branches.push(SwitchBranch { a1, a2, kraus });
        }
    }
    Ok(branches)
}

/// Noise knobs of the simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    /// Fraction of control coherence retained between the two orders.
    pub visibility: f64,
    /// Weight of the Bell state against white noise.
    pub werner_p: f64,
    /// Detection efficiency; only thins sampled counts.
    pub efficiency: f64,
}

impl NoiseModel {
    pub const IDEAL: NoiseModel = NoiseModel {
        visibility: 1.0,
        werner_p: 1.0,
        efficiency: 1.0,
    };

    pub fn new(visibility: f64, werner_p: f64, efficiency: f64) -> Result<Self> {
        let noise = Self {
            visibility,
            werner_p,
            efficiency,
        };
        noise.validate()?;
        Ok(noise)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::Config(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if !(0.0..=1.0).contains(&self.werner_p) {
            return Err(Error::Config(format!(
                "werner_p {} outside [0, 1]",
                self.werner_p
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Config(format!(
                "efficiency {} outside (0, 1]",
                self.efficiency
            )));
        }
        Ok(())
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::IDEAL
    }
}

/// Measurement angles; each observable is `cos θ · Z + sin θ · X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSettings {
    /// Bob's angle for `y = 0, 1`.
    pub bob: [f64; 2],
    /// Charlie's angle for `z = 0, 1`.
    pub charlie: [f64; 2],
}

impl AngleSettings {
    /// Bob measures Z then X; Charlie measures (Z+X)/√2 then (Z−X)/√2.
    pub const CANONICAL: AngleSettings = AngleSettings {
        bob: [0.0, FRAC_PI_2],
        charlie: [FRAC_PI_4, -FRAC_PI_4],
    };

    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        for a in self.bob.iter().chain(&self.charlie) {
            if !a.is_finite() || *a < -pi || *a > pi {
                return Err(Error::Config(format!("angle {a} outside [-π, π]")));
            }
        }
        Ok(())
    }

    pub fn bob_observable(&self, y: u8) -> BinaryObservable {
        BinaryObservable::from_angle(self.bob[y as usize])
    }

    pub fn charlie_observable(&self, z: u8) -> BinaryObservable {
        BinaryObservable::from_angle(self.charlie[z as usize])
    }
}

impl Default for AngleSettings {
    fn default() -> Self {
        Self::CANONICAL
    }
}

/// `[p·|Φ⁺⟩⟨Φ⁺| + (1−p)·I/4]_BC ⊗ |0⟩⟨0|_T`.
pub fn initial_state(noise: &NoiseModel) -> Result<DensityMatrix> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let phi_plus = [s, z, z, s];
    let bell = ComplexMatrix::outer(&phi_plus, &phi_plus);
    let white = ComplexMatrix::identity(4).scale(0.25);
    let bc = bell
        .scale(noise.werner_p)
        .add(&white.scale(1.0 - noise.werner_p))?;
    DensityMatrix::new(tensor(&bc, &ComplexMatrix::ket_bra(0, 0, 2)))
}

/// `(1+V)/2 · ρ + (1−V)/2 · Z_C ρ Z_C`: scales the control coherences by `V`.
pub fn dephase_control(
    rho: &DensityMatrix,
    layout: &SubsystemLayout,
    visibility: f64,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::Config(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let z_c = layout.embed(&[(Subsystem::C, &ComplexMatrix::pauli_z())])?;
    let flipped = conjugate_apply(&z_c, rho)?;
    let mixed = rho
        .matrix()
        .scale((1.0 + visibility) / 2.0)
        .add(&flipped.matrix().scale((1.0 - visibility) / 2.0))?;
    DensityMatrix::new(mixed)
}

/// Unnormalized `B ⊗ C ⊗ T` states after the switch, one per `(x1, x2, a1, a2)`.
#[derive(Debug, Clone)]
pub struct PostSwitchStates {
    states: Vec<DensityMatrix>,
}

impl PostSwitchStates {
    fn slot(x1: u8, x2: u8, a1: u8, a2: u8) -> usize {
        ((x1 as usize) << 3) | ((x2 as usize) << 2) | ((a1 as usize) << 1) | a2 as usize
    }

    pub fn get(&self, x1: u8, x2: u8, a1: u8, a2: u8) -> &DensityMatrix {
        &self.states[Self::slot(x1, x2, a1, a2)]
    }
}

/// Runs initial state → switch → control dephasing for all four input pairs.
pub fn post_switch_states(noise: &NoiseModel) -> Result<PostSwitchStates> {
    noise.validate()?;
    let layout = SubsystemLayout::bct();
    let rho0 = initial_state(noise)?;
    let mut states = Vec::with_capacity(16);
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            let branches = switch_kraus(&measure_reprepare(x1)?, &measure_reprepare(x2)?)?;
            for branch in &branches {
                let mut acc = ComplexMatrix::zeros(8, 8);
                for w in &branch.kraus {
                    let lifted = tensor(&ComplexMatrix::identity(2), w);
                    acc = acc.add(conjugate_apply(&lifted, &rho0)?.matrix())?;
                }
                let rho = DensityMatrix::new(acc)?;
                states.push(dephase_control(&rho, &layout, noise.visibility)?);
            }
            debug_assert_eq!(states.len(), PostSwitchStates::slot(x1, x2, 1, 1) + 1);
        }
    }
    Ok(PostSwitchStates { states })
}

/// Exact behavior at the canonical measurement angles.
pub fn compute_behavior(noise: &NoiseModel) -> Result<Behavior> {
    compute_behavior_with_angles(noise, &AngleSettings::CANONICAL)
}

pub fn compute_behavior_with_angles(
    noise: &NoiseModel,
    angles: &AngleSettings,
) -> Result<Behavior> {
    angles.validate()?;
    let states = post_switch_states(noise)?;
    let layout = SubsystemLayout::bct();
    let mut table = [0.0; NUM_CELLS];
    for s in Settings::all() {
        let (b0, b1) = projectors_of(&angles.bob_observable(s.y));
        let (c0, c1) = projectors_of(&angles.charlie_observable(s.z));
        let bob = [b0, b1];
        let charlie = [c0, c1];
        for o in Outcome::all() {
            let effect = layout.embed(&[
                (Subsystem::B, &bob[o.b as usize]),
                (Subsystem::C, &charlie[o.c as usize]),
            ])?;
            let rho = states.get(s.x1, s.x2, o.a1, o.a2);
            table[crate::behavior::cell_index(s, o)] = rho.expectation(&effect)?;
        }
    }
    Behavior::new(table)
}
