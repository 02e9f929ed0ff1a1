//! Binary and CSV trace formats.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! "TMC1" | d: u32 | n: u64 | seed: u64          24-byte header
//! x_0: d x f64                                   initial state
//! x_k: d x f64 | accepted_k: u8   (k = 1..=n)    one record per transition
//! ```
//!
//! [`TraceWriter`] streams records through a buffered writer, so a chain never
//! needs to be held in memory to be written.

use crate::error::{Error, Result};
use crate::kernel::{ChainTrace, TraceSink};
use std::io::{BufWriter, Read, Write};

pub const MAGIC: &[u8; 4] = b"TMC1";
pub const HEADER_LEN: usize = 24;

/// Total file size in bytes for a trace of dimension `d` with `n` transitions.
pub fn encoded_len(d: usize, n: u64) -> u64 {
    HEADER_LEN as u64 + (n + 1) * 8 * d as u64 + n
}

pub struct TraceWriter<W: Write> {
    out: BufWriter<W>,
    d: usize,
    expected: u64,
    written: u64,
    started: bool,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(inner: W) -> Self {
        TraceWriter {
            out: BufWriter::with_capacity(1 << 20, inner),
            d: 0,
            expected: 0,
            written: 0,
            started: false,
        }
    }

    fn write_state(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        for v in x {
            self.out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.out.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    fn start(&mut self, d: usize, n_iter: u64, seed: u64) -> Result<()> {
        let d32 = u32::try_from(d)
            .map_err(|_| Error::InvalidParameter(format!("dimension {d} does not fit in u32")))?;
        self.out.write_all(MAGIC)?;
        self.out.write_all(&d32.to_le_bytes())?;
        self.out.write_all(&n_iter.to_le_bytes())?;
        self.out.write_all(&seed.to_le_bytes())?;
        self.d = d;
        self.expected = n_iter;
        self.started = true;
        Ok(())
    }

    fn initial(&mut self, x: &[f64]) -> Result<()> {
        self.write_state(x)
    }

    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()> {
        self.write_state(x)?;
        self.out.write_all(&[accepted as u8])?;
        self.written += 1;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if !self.started || self.written != self.expected {
            return Err(Error::TraceFormat(format!(
                "header promised {} transitions, wrote {}",
                self.expected, self.written
            )));
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Write an in-memory trace in the binary format.
pub fn write_trace<W: Write>(trace: &ChainTrace, out: W) -> Result<W> {
    let mut w = TraceWriter::new(out);
    w.start(trace.dim(), trace.n_transitions() as u64, trace.seed)?;
    let mut states = trace.states();
    w.initial(states.next().ok_or(Error::TooFewStates {
        needed: 1,
        found: 0,
    })?)?;
    for (x, &acc) in states.zip(&trace.accepted) {
        w.transition(x, acc)?;
    }
    w.finish()?;
    w.into_inner()
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::TraceFormat("truncated file".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

pub fn read_trace<R: Read>(input: R) -> Result<ChainTrace> {
    let mut r = std::io::BufReader::new(input);
    if &read_array::<4, _>(&mut r)? != MAGIC {
        return Err(Error::TraceFormat("bad magic".into()));
    }
    let d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n = u64::from_le_bytes(read_array(&mut r)?);
    let seed = u64::from_le_bytes(read_array(&mut r)?);
    if d == 0 {
        return Err(Error::TraceFormat("dimension 0".into()));
    }

    let n_usize =
        usize::try_from(n).map_err(|_| Error::TraceFormat("transition count overflows".into()))?;
    let mut states = Vec::with_capacity(d.saturating_mul(n_usize.saturating_add(1)).min(1 << 24));
    let mut accepted = Vec::with_capacity(n_usize.min(1 << 24));
    for k in 0..=n {
        for _ in 0..d {
            states.push(f64::from_le_bytes(read_array(&mut r)?));
        }
        if k > 0 {
            match read_array::<1, _>(&mut r)?[0] {
                0 => accepted.push(false),
                1 => accepted.push(true),
                b => return Err(Error::TraceFormat(format!("accept byte {b} is not 0 or 1"))),
            }
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::TraceFormat(
            "trailing bytes after last record".into(),
        ));
    }
    ChainTrace::from_parts(d, states, accepted, seed)
}

/// Streaming CSV with columns `step,accepted,x1..xd`; the initial row has an
/// empty `accepted` field.
pub struct CsvWriter<W: Write> {
    out: BufWriter<W>,
    step: u64,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(inner: W) -> Self {
        CsvWriter {
            out: BufWriter::new(inner),
            step: 0,
        }
    }

    fn row(&mut self, x: &[f64], accepted: Option<bool>) -> Result<()> {
        write!(self.out, "{},", self.step)?;
        if let Some(a) = accepted {
            write!(self.out, "{}", a as u8)?;
        }
        for v in x {
            write!(self.out, ",{v:?}")?;
        }
        writeln!(self.out)?;
        self.step += 1;
        Ok(())
    }
}

impl<W: Write> TraceSink for CsvWriter<W> {
    fn start(&mut self, d: usize, _n_iter: u64, _seed: u64) -> Result<()> {
        write!(self.out, "step,accepted")?;
        for i in 1..=d {
            write!(self.out, ",x{i}")?;
        }
        writeln!(self.out)?;
        Ok(())
    }
    fn initial(&mut self, x: &[f64]) -> Result<()> {
        self.row(x, None)
    }
    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()> {
        self.row(x, Some(accepted))
    }
    fn finish(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Write an in-memory trace as CSV.
pub fn write_csv<W: Write>(trace: &ChainTrace, out: W) -> Result<()> {
    let mut w = CsvWriter::new(out);
    w.start(trace.dim(), trace.n_transitions() as u64, trace.seed)?;
    let mut states = trace.states();
    if let Some(x0) = states.next() {
        w.initial(x0)?;
    }
    for (x, &acc) in states.zip(&trace.accepted) {
        w.transition(x, acc)?;
    }
    w.finish()
}
