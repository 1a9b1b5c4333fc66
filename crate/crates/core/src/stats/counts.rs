//! Seeded sampling of experimental rounds into count tables.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64(seed)`; shard `k` uses
//! the same key on stream `k`, so a single-shard run is stream 0. Rounds are
//! not drawn one at a time. Each shard draws its setting counts as a
//! multinomial, then the outcome counts of every setting as a multinomial,
//! then thins each cell binomially by the detection efficiency. Multinomials
//! are sampled as chains of conditional binomials. This has exactly the
//! distribution of per-round sampling with uniform settings and independent
//! Bernoulli loss, at a cost independent of the number of rounds.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Outcome, Settings, NUM_CELLS, NUM_OUTCOMES, NUM_SETTINGS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Each round draws its settings uniformly at random.
    #[default]
    Iid,
    /// Rounds are split evenly over the settings; the first `rounds % 16`
    /// settings get one extra round.
    PerSetting,
}

/// Metadata stored next to the CSV counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSidecar {
    pub seed: u64,
    pub rounds: u64,
    pub efficiency: f64,
    pub mode: SamplingMode,
    pub shards: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    counts: Vec<u64>,
    pub seed: u64,
    pub rounds: u64,
    pub efficiency: f64,
    pub mode: SamplingMode,
    pub shards: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    x1: u8,
    x2: u8,
    y: u8,
    z: u8,
    a1: u8,
    a2: u8,
    b: u8,
    c: u8,
    count: u64,
}

impl CountTable {
    pub fn from_counts(counts: Vec<u64>, sidecar: CountSidecar) -> Result<Self> {
        if counts.len() != NUM_CELLS {
            return Err(Error::dims(NUM_CELLS, counts.len()));
        }
        let table = Self {
            counts,
            seed: sidecar.seed,
            rounds: sidecar.rounds,
            efficiency: sidecar.efficiency,
            mode: sidecar.mode,
            shards: sidecar.shards,
        };
        if table.detected() > table.rounds {
            return Err(Error::InsufficientData(format!(
                "{} detections exceed {} rounds",
                table.detected(),
                table.rounds
            )));
        }
        Ok(table)
    }

    pub fn count(&self, s: Settings, o: Outcome) -> u64 {
        self.counts[s.index() * NUM_OUTCOMES + o.index()]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Detected rounds in one setting.
    pub fn setting_total(&self, s: Settings) -> u64 {
        let i = s.index() * NUM_OUTCOMES;
        self.counts[i..i + NUM_OUTCOMES].iter().sum()
    }

    pub fn detected(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn sidecar(&self) -> CountSidecar {
        CountSidecar {
            seed: self.seed,
            rounds: self.rounds,
            efficiency: self.efficiency,
            mode: self.mode,
            shards: self.shards,
        }
    }

    /// Empirical conditional frequencies; settings without data stay all zero.
    pub fn frequencies(&self) -> [f64; NUM_CELLS] {
        let mut f = [0.0; NUM_CELLS];
        for s in Settings::all() {
            let n = self.setting_total(s);
            if n > 0 {
                let i = s.index() * NUM_OUTCOMES;
                for (fk, &c) in f[i..i + NUM_OUTCOMES]
                    .iter_mut()
                    .zip(&self.counts[i..i + NUM_OUTCOMES])
                {
                    *fk = c as f64 / n as f64;
                }
            }
        }
        f
    }

    /// One row per nonzero cell.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for s in Settings::all() {
            for o in Outcome::all() {
                let count = self.count(s, o);
                if count > 0 {
                    w.serialize(CsvRow {
                        x1: s.x1,
                        x2: s.x2,
                        y: s.y,
                        z: s.z,
                        a1: o.a1,
                        a2: o.a2,
                        b: o.b,
                        c: o.c,
                        count,
                    })?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, sidecar: CountSidecar) -> Result<Self> {
        let mut counts = vec![0u64; NUM_CELLS];
        let mut seen = [false; NUM_CELLS];
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: CsvRow = row?;
            let s = Settings::new(row.x1, row.x2, row.y, row.z)
                .map_err(|e| Error::InsufficientData(format!("bad settings in counts: {e}")))?;
            if [row.a1, row.a2, row.b, row.c].iter().any(|&v| v > 1) {
                return Err(Error::InsufficientData(
                    "outcome bits must be 0 or 1".into(),
                ));
            }
            let o = Outcome {
                a1: row.a1,
                a2: row.a2,
                b: row.b,
                c: row.c,
            };
            let i = s.index() * NUM_OUTCOMES + o.index();
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InsufficientData(format!(
                    "duplicate row for cell {i}"
                )));
            }
            counts[i] = row.count;
        }
        Self::from_counts(counts, sidecar)
    }
}

fn validate(rounds: u64, efficiency: f64, shards: u32) -> Result<()> {
    if rounds == 0 {
        return Err(Error::Config("rounds must be positive".into()));
    }
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(Error::Config(format!(
            "efficiency {efficiency} outside (0, 1]"
        )));
    }
    if shards == 0 {
        return Err(Error::Config("shards must be positive".into()));
    }
    Ok(())
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("probability checked above")
        .sample(rng)
}

/// Splits `n` draws over categories with the given weights.
fn multinomial(rng: &mut ChaCha8Rng, n: u64, weights: &[f64], out: &mut [u64]) {
    out.fill(0);
    let Some(last) = weights.iter().rposition(|&w| w > 0.0) else {
        return;
    };
    let mut remaining = n;
    let mut mass: f64 = weights.iter().sum();
    for (k, (&w, slot)) in weights
        .iter()
        .zip(out.iter_mut())
        .enumerate()
        .take(last + 1)
    {
        if k == last || remaining == 0 {
            *slot = remaining;
            remaining = 0;
            continue;
        }
        let draw = binomial(rng, remaining, w / mass);
        *slot = draw;
        remaining -= draw;
        mass -= w;
    }
}

/// Rounds handled by shard `k` of `shards`: contiguous ranges, the first
/// `rounds % shards` shards one round longer.
pub fn shard_rounds(rounds: u64, shards: u32, k: u32) -> u64 {
    let base = rounds / shards as u64;
    base + u64::from((k as u64) < rounds % shards as u64)
}

fn sample_shard(
    behavior: &Behavior,
    rounds: u64,
    efficiency: f64,
    seed: u64,
    shard: u32,
    mode: SamplingMode,
) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);

    let mut per_setting = [0u64; NUM_SETTINGS];
    match mode {
        SamplingMode::Iid => multinomial(&mut rng, rounds, &[1.0; NUM_SETTINGS], &mut per_setting),
        SamplingMode::PerSetting => {
            for (s, n) in per_setting.iter_mut().enumerate() {
                *n = rounds / NUM_SETTINGS as u64
                    + u64::from((s as u64) < rounds % NUM_SETTINGS as u64);
            }
        }
    }

    let mut counts = vec![0u64; NUM_CELLS];
    for s in Settings::all() {
        let i = s.index() * NUM_OUTCOMES;
        multinomial(
            &mut rng,
            per_setting[s.index()],
            behavior.distribution(s),
            &mut counts[i..i + NUM_OUTCOMES],
        );
    }
    if efficiency < 1.0 {
        for c in counts.iter_mut() {
            *c = binomial(&mut rng, *c, efficiency);
        }
    }
    counts
}

/// Single-shard, i.i.d.-settings sampling.
pub fn sample_counts(
    behavior: &Behavior,
    rounds: u64,
    efficiency: f64,
    seed: u64,
) -> Result<CountTable> {
    sample_counts_with(behavior, rounds, efficiency, seed, SamplingMode::Iid, 1)
}

/// Shards run on separate threads and their tables are summed; the result
/// depends only on `(seed, rounds, shards, mode)`.
pub fn sample_counts_with(
    behavior: &Behavior,
    rounds: u64,
    efficiency: f64,
    seed: u64,
    mode: SamplingMode,
    shards: u32,
) -> Result<CountTable> {
    validate(rounds, efficiency, shards)?;
    if mode == SamplingMode::PerSetting && shards != 1 {
        return Err(Error::Config(
            "per-setting sampling does not support sharding".into(),
        ));
    }
    let parts: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|k| {
                let n = shard_rounds(rounds, shards, k);
                scope.spawn(move || sample_shard(behavior, n, efficiency, seed, k, mode))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling thread panicked"))
            .collect()
    });
    let mut counts = vec![0u64; NUM_CELLS];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    CountTable::from_counts(
        counts,
        CountSidecar {
            seed,
            rounds,
            efficiency,
            mode,
            shards,
        },
    )
}
