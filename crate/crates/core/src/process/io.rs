//! Text and binary leaf-list formats.
//!
//! Text: `#`-prefixed header lines, the first carrying JSON metadata, then one
//! `id,center_x,center_y,time,color,half_side` row per leaf. Binary: magic,
//! length-prefixed JSON metadata, leaf count, then fixed-width little-endian
//! records.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::{Color, Horizon, Leaf, LeafProcess, SampleStatus};
use crate::error::{Error, Result};
use crate::geometry::{Point2, WindowSpec};

const MAGIC: &[u8; 8] = b"CNFLEAF1";
const HEADER: &str = "id,center_x,center_y,time,color,half_side";

#[derive(Serialize, Deserialize)]
struct Meta {
    window: WindowSpec,
    margin: f64,
    p: Option<f64>,
    horizon: Horizon,
    seed: u64,
    trial: u64,
    status: SampleStatus,
}

impl Meta {
    fn of(proc: &LeafProcess) -> Self {
        Meta {
            window: proc.window,
            margin: proc.margin,
            p: proc.p,
            horizon: proc.horizon,
            seed: proc.seed,
            trial: proc.trial,
            status: proc.status,
        }
    }

    fn into_process(self, leaves: Vec<Leaf>) -> LeafProcess {
        LeafProcess {
            window: self.window,
            margin: self.margin,
            leaves,
            p: self.p,
            horizon: self.horizon,
            seed: self.seed,
            trial: self.trial,
            status: self.status,
        }
    }
}

pub fn write_text(proc: &LeafProcess, mut out: impl Write) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(&Meta::of(proc))?)?;
    writeln!(out, "{HEADER}")?;
    for l in &proc.leaves {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            l.id,
            l.center.x,
            l.center.y,
            l.time,
            l.color.sign(),
            l.half_side
        )?;
    }
    Ok(())
}

pub fn read_text(input: impl BufRead) -> Result<LeafProcess> {
    let mut meta: Option<Meta> = None;
    let mut leaves = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let err = |msg: String| Error::Parse { line: lineno, msg };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed == HEADER {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if meta.is_none() {
                let rest = rest.trim();
                if rest.starts_with('{') {
                    meta = Some(serde_json::from_str(rest).map_err(|e| err(e.to_string()))?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| err(format!("field {}: {e}", i + 1)))
        };
        let id = fields[0].parse::<u32>().map_err(|e| err(format!("id: {e}")))?;
        let sign = fields[4].parse::<i8>().map_err(|e| err(format!("color: {e}")))?;
        let color = Color::from_sign(sign).ok_or_else(|| err(format!("color must be 1 or -1, got {sign}")))?;
        let (x, y, t, h) = (num(1)?, num(2)?, num(3)?, num(5)?);
        if !(h > 0.0) || !x.is_finite() || !y.is_finite() || !t.is_finite() {
            return Err(err("non-finite coordinate or non-positive half side".into()));
        }
        leaves.push(Leaf { id, center: Point2::new(x, y), time: t, color, half_side: h });
    }
    let meta = meta.ok_or(Error::Parse { line: 1, msg: "missing metadata header".into() })?;
    if leaves.windows(2).any(|w| w[0].time > w[1].time) {
        return Err(Error::Parse { line: 0, msg: "leaves are not sorted by time".into() });
    }
    Ok(meta.into_process(leaves))
}

pub fn write_binary(proc: &LeafProcess, mut out: impl Write) -> Result<()> {
    let meta = serde_json::to_vec(&Meta::of(proc))?;
    out.write_all(MAGIC)?;
    out.write_all(&(meta.len() as u64).to_le_bytes())?;
    out.write_all(&meta)?;
    out.write_all(&(proc.leaves.len() as u64).to_le_bytes())?;
    for l in &proc.leaves {
        out.write_all(&l.id.to_le_bytes())?;
        for v in [l.center.x, l.center.y, l.time, l.half_side] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&l.color.sign().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(mut input: impl Read) -> Result<LeafProcess> {
    let bad = |msg: &str| Error::Parse { line: 0, msg: msg.into() };
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a binary leaf file"));
    }
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u64buf)?;
    let mut meta = vec![0u8; u64::from_le_bytes(u64buf) as usize];
    input.read_exact(&mut meta)?;
    let meta: Meta = serde_json::from_slice(&meta)?;
    input.read_exact(&mut u64buf)?;
    let n = u64::from_le_bytes(u64buf) as usize;
    let mut leaves = Vec::with_capacity(n.min(1 << 24));
    let mut rec = [0u8; 4 + 32 + 1];
    for _ in 0..n {
        input.read_exact(&mut rec)?;
        let f = |i: usize| f64::from_le_bytes(rec[4 + 8 * i..12 + 8 * i].try_into().unwrap());
        let color = Color::from_sign(rec[36] as i8).ok_or_else(|| bad("invalid color byte"))?;
        leaves.push(Leaf {
            id: u32::from_le_bytes(rec[..4].try_into().unwrap()),
            center: Point2::new(f(0), f(1)),
            time: f(2),
            half_side: f(3),
            color,
        });
    }
    Ok(meta.into_process(leaves))
}
