//! Search over Bob's and Charlie's measurement angles.
//!
//! The post-switch states do not depend on the angles, so each state is
//! reduced once to its real correlation tensor `T[i][j] = Tr[(σ_i ⊗ σ_j ⊗ I) ρ]`
//! with `σ ∈ {I, Z, X}`. Every outcome probability is then bilinear in
//! `(1, ±cos θ, ±sin θ)` for Bob and Charlie.
//!
//! The VBC total splits as `F(θ0) + Σ_{y,z} G_yz(θ_y, φ_z)`: terms 1 and 2
//! only see Bob's `y = 0` angle, term 3 is a sum of four pair terms. The
//! coarse grid search tabulates `F` and `G_yz` on the grid and scans all
//! `72⁴` angle combinations in a fixed order (strict improvement only, so
//! the first maximiser wins ties). Coordinate descent with step halving then
//! refines the grid optimum down to a step of `1e-7`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inequality::vbc::evaluate_vbc;
use crate::linalg::{ComplexMatrix, Subsystem, SubsystemLayout};
use crate::switch::{compute_behavior_with_angles, post_switch_states, AngleSettings, NoiseModel};

const GRID_POINTS: usize = 72;
const GRID_STEP: f64 = PI / 36.0;
const REFINE_MIN_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub angles: AngleSettings,
    /// VBC total at `angles`, evaluated through the full behavior pipeline.
    pub best_total: f64,
    pub grid_total: f64,
    pub canonical_total: f64,
    pub evaluations: u64,
}

/// Angle-independent summary of the post-switch states.
#[derive(Debug, Clone)]
pub(crate) struct CorrelationTensors {
    /// Indexed `[2*x1 + x2][2*a1 + a2][i][j]`.
    t: [[[[f64; 3]; 3]; 4]; 4],
}

impl CorrelationTensors {
    pub(crate) fn new(noise: &NoiseModel) -> Result<Self> {
        let states = post_switch_states(noise)?;
        let layout = SubsystemLayout::bct();
        let paulis = [
            ComplexMatrix::identity(2),
            ComplexMatrix::pauli_z(),
            ComplexMatrix::pauli_x(),
        ];
        let mut ops = Vec::with_capacity(9);
        for sb in &paulis {
            for sc in &paulis {
                ops.push(layout.embed(&[(Subsystem::B, sb), (Subsystem::C, sc)])?);
            }
        }
        let mut t = [[[[0.0; 3]; 3]; 4]; 4];
        for x1 in 0..2u8 {
            for x2 in 0..2u8 {
                for a1 in 0..2u8 {
                    for a2 in 0..2u8 {
                        let rho = states.get(x1, x2, a1, a2);
                        let slot = &mut t[(2 * x1 + x2) as usize][(2 * a1 + a2) as usize];
                        for i in 0..3 {
                            for j in 0..3 {
                                slot[i][j] = rho.expectation(&ops[3 * i + j])?;
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { t })
    }

    fn prob(&self, x: usize, a: usize, b: u8, c: u8, theta: f64, phi: f64) -> f64 {
        let sb = if b == 0 { 1.0 } else { -1.0 };
        let sc = if c == 0 { 1.0 } else { -1.0 };
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let u = [1.0, sb * ct, sb * st];
        let v = [1.0, sc * cp, sc * sp];
        let t = &self.t[x][a];
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += u[i] * v[j] * t[i][j];
            }
        }
        acc / 4.0
    }

    /// Terms 1 + 2 as a function of Bob's `y = 0` angle.
    fn bob_part(&self, theta0: f64) -> f64 {
        let mut acc = 0.0;
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                let x = 2 * x1 + x2;
                for a in 0..4usize {
                    let (a1, a2) = (a >> 1, a & 1);
                    for c in 0..2 {
                        if a2 == x1 {
                            acc += self.prob(x, a, 0, c, theta0, 0.0);
                        }
                        if a1 == x2 {
                            acc += self.prob(x, a, 1, c, theta0, 0.0);
                        }
                    }
                }
            }
        }
        acc / 4.0
    }

    /// Contribution of setting `(0, 0, y, z)` to term 3.
    fn pair_part(&self, y: u8, z: u8, theta: f64, phi: f64) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..2u8 {
                for c in 0..2u8 {
                    if (b ^ c) == (y & z) {
                        acc += self.prob(0, a, b, c, theta, phi);
                    }
                }
            }
        }
        acc / 4.0
    }

    pub(crate) fn total(&self, angles: &AngleSettings) -> f64 {
        let [t0, t1] = angles.bob;
        let [p0, p1] = angles.charlie;
        self.bob_part(t0)
            + self.pair_part(0, 0, t0, p0)
            + self.pair_part(0, 1, t0, p1)
            + self.pair_part(1, 0, t1, p0)
            + self.pair_part(1, 1, t1, p1)
    }
}

fn grid_angle(k: usize) -> f64 {
    -PI + k as f64 * GRID_STEP
}

fn wrap(angle: f64) -> f64 {
    let mut a = angle;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a < -PI {
        a += 2.0 * PI;
    }
    a
}

fn coordinate(angles: &mut AngleSettings, k: usize) -> &mut f64 {
    match k {
        0 => &mut angles.bob[0],
        1 => &mut angles.bob[1],
        2 => &mut angles.charlie[0],
        _ => &mut angles.charlie[1],
    }
}

/// Maximizes the VBC total over the four measurement angles.
pub fn optimize_settings(noise: &NoiseModel) -> Result<OptimizeResult> {
    let tensors = CorrelationTensors::new(noise)?;
    let mut evaluations = 0u64;

    let bob: Vec<f64> = (0..GRID_POINTS)
        .map(|k| tensors.bob_part(grid_angle(k)))
        .collect();
    let mut pair = vec![vec![0.0; GRID_POINTS * GRID_POINTS]; 4];
    for (yz, table) in pair.iter_mut().enumerate() {
        let (y, z) = ((yz >> 1) as u8, (yz & 1) as u8);
        for k in 0..GRID_POINTS {
            for l in 0..GRID_POINTS {
                table[k * GRID_POINTS + l] = tensors.pair_part(y, z, grid_angle(k), grid_angle(l));
            }
        }
    }

    let mut best = f64::NEG_INFINITY;
    let mut best_idx = [0usize; 4];
    for k0 in 0..GRID_POINTS {
        for k1 in 0..GRID_POINTS {
            for l0 in 0..GRID_POINTS {
                let partial =
                    bob[k0] + pair[0][k0 * GRID_POINTS + l0] + pair[2][k1 * GRID_POINTS + l0];
                for l1 in 0..GRID_POINTS {
                    let total =
                        partial + pair[1][k0 * GRID_POINTS + l1] + pair[3][k1 * GRID_POINTS + l1];
                    if total > best {
                        best = total;
                        best_idx = [k0, k1, l0, l1];
                    }
                }
            }
        }
    }
    evaluations += (GRID_POINTS as u64).pow(4);

    let mut angles = AngleSettings {
        bob: [grid_angle(best_idx[0]), grid_angle(best_idx[1])],
        charlie: [grid_angle(best_idx[2]), grid_angle(best_idx[3])],
    };
    let mut current = tensors.total(&angles);
    let grid_total = current;

    let mut step = GRID_STEP;
    while step >= REFINE_MIN_STEP {
        let mut improved = false;
        for k in 0..4 {
            for dir in [1.0, -1.0] {
                let mut trial = angles;
                let slot = coordinate(&mut trial, k);
                *slot = wrap(*slot + dir * step);
                let value = tensors.total(&trial);
                evaluations += 1;
                if value > current {
                    angles = trial;
                    current = value;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }

    let canonical_total = evaluate_vbc(&compute_behavior_with_angles(
        noise,
        &AngleSettings::CANONICAL,
    )?)
    .total;
    let mut best_total = evaluate_vbc(&compute_behavior_with_angles(noise, &angles)?).total;
    if canonical_total > best_total {
        angles = AngleSettings::CANONICAL;
        best_total = canonical_total;
    }

    Ok(OptimizeResult {
        angles,
        best_total,
        grid_total,
        canonical_total,
        evaluations,
    })
}

/// Whether `angles` match the canonical settings, or their mirror image under
/// `X → −X` (all angles negated), within `tol` radians.
pub fn equivalent_to_canonical(angles: &AngleSettings, tol: f64) -> bool {
    let close = |a: f64, b: f64| wrap(a - b).abs() <= tol;
    let matches = |sign: f64| {
        let c = AngleSettings::CANONICAL;
        close(angles.bob[0], sign * c.bob[0])
            && close(angles.bob[1], sign * c.bob[1])
            && close(angles.charlie[0], sign * c.charlie[0])
            && close(angles.charlie[1], sign * c.charlie[1])
    };
    matches(1.0) || matches(-1.0)
}
