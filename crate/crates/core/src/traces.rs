//! Timestamped power traces with kernel markers, their CSV form, and the
//! reduction from marker-delimited segments to per-kernel sweep tables.
//!
//! # Trace CSV
//!
//! UTF-8, LF line endings, `.` decimal point, no thousands separators.
//! Comment lines start with `#`; a `# key=value` comment carries metadata
//! (the key `sample_rate_hz` is reserved and required). The header and the
//! three row shapes are fixed:
//!
//! ```text
//! # sample_rate_hz=100
//! t_s,record,channel,value,kernel,freq_mhz
//! 12.34,sample,package,105.34,,
//! 12.3,begin,,,propagate,650
//! 13.9,end,,,propagate,650
//! ```
//!
//! Numbers are written in shortest round-trip form, so parse -> emit is
//! byte-stable and lossless. Rows are emitted in canonical order: ascending
//! time, with `end` markers before `begin` markers before samples at equal
//! times, then by kernel or channel name.
//!
//! # Sweep CSV
//!
//! Same conventions with header `kernel,freq_mhz,t_s,e_s_j,p_avg_w`, rows
//! sorted by kernel name then ascending frequency.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: timestamps not strictly increasing within channel {channel}")]
    NonMonotoneTimestamps { line: usize, channel: Channel },
    #[error("unbalanced begin/end markers for kernel {kernel} (line {line})")]
    UnbalancedMarkers { kernel: String, line: usize },
    #[error("marker for kernel {kernel} at {t} s lies outside the sampled span")]
    MarkerOutsideSamples { kernel: String, t: f64 },
    #[error("missing '# sample_rate_hz=...' metadata")]
    MissingSampleRate,
    #[error("segment holds {got} samples; at least 2 are needed to integrate")]
    InsufficientSamples { got: usize },
    #[error("no markers for kernel {kernel}")]
    UnknownKernel { kernel: String },
    #[error("channel {channel} not present in trace")]
    MissingChannel { channel: Channel },
    #[error("channels disagree on sample timestamps at sample index {index}")]
    TimestampMismatch { index: usize },
    #[error("repeated segments for kernel {kernel} at {freq} MHz disagree on {what} by more than 10%")]
    InconsistentDuplicates { kernel: String, freq: f64, what: &'static str },
    #[error("no marker-delimited segments found; nothing to aggregate")]
    NothingToAggregate,
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid sweep table: {0}")]
    InvalidSweep(String),
}

/// First non-comment line of every trace CSV.
pub const TRACE_HEADER: &str = "t_s,record,channel,value,kernel,freq_mhz";
/// First non-comment line of every sweep CSV.
pub const SWEEP_HEADER: &str = "kernel,freq_mhz,t_s,e_s_j,p_avg_w";
const SAMPLE_RATE_KEY: &str = "sample_rate_hz";

/// Power rail a sample was read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Package,
    Dram,
    Device,
    Node,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Package, Channel::Dram, Channel::Device, Channel::Node];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Package => "package",
            Channel::Dram => "dram",
            Channel::Device => "device",
            Channel::Node => "node",
        }
    }

    fn from_str(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One instantaneous power reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSample {
    /// Seconds from trace start.
    pub t: f64,
    pub channel: Channel,
    /// Watts; never negative.
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerKind {
    Begin,
    End,
}

/// Delimits a kernel execution region in a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub t: f64,
    pub kernel: String,
    pub kind: MarkerKind,
    /// Clock frequency in force for the delimited region, in MHz
    /// (0 when not applicable, e.g. workload-only marker streams).
    pub freq: f64,
}

/// A full measurement: samples, markers, and provenance metadata.
///
/// Samples are held sorted by `(t, channel)` and markers by
/// `(t, end-before-begin, kernel)`; [`PowerTrace::new`] canonicalizes and
/// validates. Within one channel timestamps are strictly increasing, and
/// every marker lies inside the sampled span (when samples exist).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    pub samples: Vec<PowerSample>,
    pub markers: Vec<Marker>,
    /// Nominal sampling rate in Hz.
    pub sample_rate: f64,
    /// Free-form `key=value` metadata carried in `#` comments.
    pub meta: BTreeMap<String, String>,
}

fn marker_rank(kind: MarkerKind) -> u8 {
    match kind {
        MarkerKind::End => 0,
        MarkerKind::Begin => 1,
    }
}

impl PowerTrace {
    /// Build a canonical trace: sorts samples and markers, then validates
    /// monotonicity, marker pairing, and the marker-within-samples invariant.
    pub fn new(
        mut samples: Vec<PowerSample>,
        mut markers: Vec<Marker>,
        sample_rate: f64,
        meta: BTreeMap<String, String>,
    ) -> Result<Self, TraceError> {
        if !(sample_rate > 0.0) {
            return Err(TraceError::InvalidTrace("sample_rate must be positive".into()));
        }
        for (k, v) in &meta {
            if k.contains('=') || k.contains('\n') || v.contains('\n') {
                return Err(TraceError::InvalidTrace(format!("metadata key/value {k:?} not CSV-safe")));
            }
        }
        for s in &samples {
            if !s.t.is_finite() || s.t < 0.0 || !s.power.is_finite() || s.power < 0.0 {
                return Err(TraceError::InvalidTrace(format!(
                    "sample at t={} with power={} out of domain",
                    s.t, s.power
                )));
            }
        }
        for m in &markers {
            if !m.t.is_finite() || m.t < 0.0 || !m.freq.is_finite() || m.freq < 0.0 {
                return Err(TraceError::InvalidTrace(format!("marker at t={} out of domain", m.t)));
            }
            if m.kernel.is_empty() || m.kernel.contains(',') || m.kernel.contains('\n') {
                return Err(TraceError::InvalidTrace(format!("kernel name {:?} not CSV-safe", m.kernel)));
            }
        }
        samples.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.channel.cmp(&b.channel)));
        for w in samples.windows(2) {
            if w[0].channel == w[1].channel && !(w[1].t > w[0].t) {
                return Err(TraceError::NonMonotoneTimestamps { line: 0, channel: w[0].channel });
            }
        }
        // Duplicate (t, channel) pairs across non-adjacent entries cannot
        // occur: the sort is total on (t, channel).
        markers.sort_by(|a, b| {
            a.t.total_cmp(&b.t)
                .then(marker_rank(a.kind).cmp(&marker_rank(b.kind)))
                .then(a.kernel.cmp(&b.kernel))
        });
        let trace = PowerTrace { samples, markers, sample_rate, meta };
        for kernel in trace.kernels() {
            trace.marker_pairs(&kernel)?;
        }
        if let (Some(first), Some(last)) = (trace.samples.first(), trace.samples.last()) {
            for m in &trace.markers {
                if m.t < first.t || m.t > last.t {
                    return Err(TraceError::MarkerOutsideSamples { kernel: m.kernel.clone(), t: m.t });
                }
            }
        }
        Ok(trace)
    }

    /// Kernel names that appear in markers, sorted.
    pub fn kernels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.markers.iter().map(|m| m.kernel.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Channels that appear in samples, sorted.
    pub fn channels(&self) -> Vec<Channel> {
        let set: BTreeSet<Channel> = self.samples.iter().map(|s| s.channel).collect();
        set.into_iter().collect()
    }

    /// Begin/end marker pairs for one kernel, in time order.
    pub fn marker_pairs(&self, kernel: &str) -> Result<Vec<(&Marker, &Marker)>, TraceError> {
        let ms: Vec<&Marker> = self.markers.iter().filter(|m| m.kernel == kernel).collect();
        if ms.is_empty() {
            return Err(TraceError::UnknownKernel { kernel: kernel.into() });
        }
        let mut pairs = Vec::with_capacity(ms.len() / 2);
        let mut open: Option<&Marker> = None;
        for m in ms {
            match (m.kind, open) {
                (MarkerKind::Begin, None) => open = Some(m),
                (MarkerKind::End, Some(b)) => {
                    pairs.push((b, m));
                    open = None;
                }
                _ => return Err(TraceError::UnbalancedMarkers { kernel: kernel.into(), line: 0 }),
            }
        }
        if open.is_some() {
            return Err(TraceError::UnbalancedMarkers { kernel: kernel.into(), line: 0 });
        }
        Ok(pairs)
    }
}

/// Samples of one channel inside one marker-delimited region.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub kernel: String,
    /// Frequency stamped on the begin marker, MHz.
    pub freq: f64,
    pub begin: f64,
    pub end: f64,
    pub channel: Channel,
    /// `(t, power)` pairs with `begin <= t <= end`, in time order.
    pub samples: Vec<(f64, f64)>,
}

/// Cut a trace into per-channel segments for one kernel. Every begin/end
/// pair produces one segment per sampled channel; segments may be empty
/// (integration rejects them later).
pub fn segment(trace: &PowerTrace, kernel: &str) -> Result<Vec<Segment>, TraceError> {
    let pairs = trace.marker_pairs(kernel)?;
    let channels = trace.channels();
    let mut out = Vec::with_capacity(pairs.len() * channels.len());
    for (b, e) in pairs {
        for &channel in &channels {
            let samples: Vec<(f64, f64)> = trace
                .samples
                .iter()
                .filter(|s| s.channel == channel && s.t >= b.t && s.t <= e.t)
                .map(|s| (s.t, s.power))
                .collect();
            out.push(Segment {
                kernel: kernel.into(),
                freq: b.freq,
                begin: b.t,
                end: e.t,
                channel,
                samples,
            });
        }
    }
    Ok(out)
}

/// Trapezoidal energy of a segment in joules. The gaps between the marker
/// boundaries and the first/last sample are filled at the nearest sample's
/// power.
pub fn integrate_energy(seg: &Segment) -> Result<f64, TraceError> {
    if seg.samples.len() < 2 {
        return Err(TraceError::InsufficientSamples { got: seg.samples.len() });
    }
    let first = seg.samples[0];
    let last = *seg.samples.last().expect("len >= 2");
    let mut e = (first.0 - seg.begin) * first.1 + (seg.end - last.0) * last.1;
    for w in seg.samples.windows(2) {
        e += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    Ok(e)
}

/// Mean power over a segment in watts.
pub fn average_power(seg: &Segment) -> Result<f64, TraceError> {
    Ok(integrate_energy(seg)? / (seg.end - seg.begin))
}

/// Collapse several channels into one by summing their powers sample-wise.
/// All requested channels must be present with bitwise-identical timestamp
/// vectors. A multi-channel sum is labeled [`Channel::Node`]; summing a
/// single channel is the identity.
pub fn sum_channels(trace: &PowerTrace, channels: &[Channel]) -> Result<PowerTrace, TraceError> {
    let wanted: BTreeSet<Channel> = channels.iter().copied().collect();
    if wanted.is_empty() {
        return Err(TraceError::InvalidTrace("no channels requested".into()));
    }
    let mut per_channel: Vec<Vec<(f64, f64)>> = Vec::new();
    for &ch in &wanted {
        let v: Vec<(f64, f64)> = trace
            .samples
            .iter()
            .filter(|s| s.channel == ch)
            .map(|s| (s.t, s.power))
            .collect();
        if v.is_empty() {
            return Err(TraceError::MissingChannel { channel: ch });
        }
        per_channel.push(v);
    }
    let n = per_channel[0].len();
    if per_channel.iter().any(|v| v.len() != n) {
        let index = per_channel.iter().map(Vec::len).min().expect("non-empty");
        return Err(TraceError::TimestampMismatch { index });
    }
    let out_channel =
        if wanted.len() == 1 { *wanted.iter().next().expect("one") } else { Channel::Node };
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = per_channel[0][i].0;
        let mut power = 0.0;
        for v in &per_channel {
            if v[i].0.to_bits() != t.to_bits() {
                return Err(TraceError::TimestampMismatch { index: i });
            }
            power += v[i].1;
        }
        samples.push(PowerSample { t, channel: out_channel, power });
    }
    PowerTrace::new(samples, trace.markers.clone(), trace.sample_rate, trace.meta.clone())
}

/// One row of a per-kernel frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// MHz.
    pub freq: f64,
    /// Mean segment duration, seconds.
    pub t_s: f64,
    /// Mean segment energy, joules.
    pub e_s: f64,
    /// `e_s / t_s`, watts.
    pub p_avg: f64,
}

/// Per-kernel sweep rows, each kernel sorted by ascending frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub kernels: BTreeMap<String, Vec<SweepPoint>>,
}

impl SweepTable {
    pub fn get(&self, kernel: &str) -> Option<&[SweepPoint]> {
        self.kernels.get(kernel).map(Vec::as_slice)
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        for (kernel, rows) in &self.kernels {
            if rows.is_empty() {
                return Err(TraceError::InvalidSweep(format!("kernel {kernel} has no rows")));
            }
            for w in rows.windows(2) {
                if !(w[1].freq > w[0].freq) {
                    return Err(TraceError::InvalidSweep(format!(
                        "kernel {kernel}: frequencies must be unique and ascending"
                    )));
                }
            }
            for r in rows {
                if !(r.freq > 0.0 && r.t_s > 0.0 && r.e_s >= 0.0) {
                    return Err(TraceError::InvalidSweep(format!(
                        "kernel {kernel}: non-positive row at {} MHz",
                        r.freq
                    )));
                }
                if (r.e_s - r.p_avg * r.t_s).abs() > 1e-9 * r.e_s.abs().max(1e-300) {
                    return Err(TraceError::InvalidSweep(format!(
                        "kernel {kernel}: e_s and p_avg*t_s disagree at {} MHz",
                        r.freq
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Reduce traces to a sweep table: every begin/end pair contributes one
/// `(kernel, freq)` observation whose energy sums all sampled channels.
/// Repeated observations of the same `(kernel, freq)` are averaged and must
/// agree within 10% on both duration and energy.
pub fn build_sweep(traces: &[PowerTrace]) -> Result<SweepTable, TraceError> {
    // Keyed by (kernel, freq bits); positive floats order like their bits.
    let mut acc: BTreeMap<(String, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for trace in traces {
        for kernel in trace.kernels() {
            let pairs = trace.marker_pairs(&kernel)?;
            let channels = trace.channels();
            for (b, e) in pairs {
                let mut energy = 0.0;
                for &channel in &channels {
                    let samples: Vec<(f64, f64)> = trace
                        .samples
                        .iter()
                        .filter(|s| s.channel == channel && s.t >= b.t && s.t <= e.t)
                        .map(|s| (s.t, s.power))
                        .collect();
                    let seg = Segment {
                        kernel: kernel.clone(),
                        freq: b.freq,
                        begin: b.t,
                        end: e.t,
                        channel,
                        samples,
                    };
                    energy += integrate_energy(&seg)?;
                }
                acc.entry((kernel.clone(), b.freq.to_bits()))
                    .or_default()
                    .push((e.t - b.t, energy));
            }
        }
    }
    if acc.is_empty() {
        return Err(TraceError::NothingToAggregate);
    }
    let mut table = SweepTable::default();
    for ((kernel, freq_bits), obs) in acc {
        let freq = f64::from_bits(freq_bits);
        let n = obs.len() as f64;
        let t_s = obs.iter().map(|o| o.0).sum::<f64>() / n;
        let e_s = obs.iter().map(|o| o.1).sum::<f64>() / n;
        for (what, pick) in [("duration", 0usize), ("energy", 1usize)] {
            let vals = obs.iter().map(|o| if pick == 0 { o.0 } else { o.1 });
            let max = vals.clone().fold(f64::MIN, f64::max);
            let min = vals.fold(f64::MAX, f64::min);
            let mean = if pick == 0 { t_s } else { e_s };
            if obs.len() > 1 && (max - min) > 0.10 * mean.abs() {
                return Err(TraceError::InconsistentDuplicates { kernel, freq, what });
            }
        }
        table
            .kernels
            .entry(kernel)
            .or_default()
            .push(SweepPoint { freq, t_s, e_s, p_avg: e_s / t_s });
    }
    for rows in table.kernels.values_mut() {
        rows.sort_by(|a, b| a.freq.total_cmp(&b.freq));
    }
    table.validate()?;
    Ok(table)
}

// ============================================================================
// CSV encoding

fn push_meta_comments(out: &mut String, meta: &BTreeMap<String, String>) {
    for (k, v) in meta {
        if k != SAMPLE_RATE_KEY {
            let _ = writeln!(out, "# {k}={v}");
        }
    }
}

/// Render a trace in canonical CSV form (lossless; see module docs).
pub fn emit_trace(trace: &PowerTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {SAMPLE_RATE_KEY}={}", trace.sample_rate);
    push_meta_comments(&mut out, &trace.meta);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    // (t, rank, name) keys merge samples and markers deterministically.
    let mut rows: Vec<(f64, u8, &str, String)> = Vec::with_capacity(trace.samples.len() + trace.markers.len());
    for s in &trace.samples {
        rows.push((s.t, 2, s.channel.as_str(), format!("{},sample,{},{},,", s.t, s.channel, s.power)));
    }
    for m in &trace.markers {
        let kind = match m.kind {
            MarkerKind::Begin => "begin",
            MarkerKind::End => "end",
        };
        rows.push((m.t, marker_rank(m.kind), &m.kernel, format!("{},{kind},,,{},{}", m.t, m.kernel, m.freq)));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(b.2)));
    for (_, _, _, line) in rows {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64, TraceError> {
    let v: f64 = s
        .parse()
        .map_err(|_| TraceError::MalformedRow { line, reason: format!("bad {what} {s:?}") })?;
    if !v.is_finite() {
        return Err(TraceError::MalformedRow { line, reason: format!("non-finite {what} {s:?}") });
    }
    Ok(v)
}

/// Parse trace CSV. Errors carry 1-based line numbers and distinguish
/// malformed rows, non-monotone timestamps, and unbalanced markers.
pub fn parse_trace(text: &str) -> Result<PowerTrace, TraceError> {
    let mut meta = BTreeMap::new();
    let mut sample_rate: Option<f64> = None;
    let mut samples: Vec<PowerSample> = Vec::new();
    let mut markers: Vec<(Marker, usize)> = Vec::new();
    let mut last_t: BTreeMap<Channel, f64> = BTreeMap::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(comment) = raw.strip_prefix('#') {
            let comment = comment.trim_start();
            if let Some((k, v)) = comment.split_once('=') {
                if k == SAMPLE_RATE_KEY {
                    if sample_rate.is_some() {
                        return Err(TraceError::MalformedRow {
                            line,
                            reason: "duplicate sample_rate_hz".into(),
                        });
                    }
                    sample_rate = Some(parse_f64(v, line, "sample rate")?);
                } else {
                    meta.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        if raw.is_empty() {
            continue;
        }
        if !seen_header {
            if raw != TRACE_HEADER {
                return Err(TraceError::MalformedRow {
                    line,
                    reason: format!("expected header {TRACE_HEADER:?}, got {raw:?}"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(TraceError::MalformedRow {
                line,
                reason: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let t = parse_f64(fields[0], line, "timestamp")?;
        if t < 0.0 {
            return Err(TraceError::MalformedRow { line, reason: "negative timestamp".into() });
        }
        match fields[1] {
            "sample" => {
                if !fields[4].is_empty() || !fields[5].is_empty() {
                    return Err(TraceError::MalformedRow {
                        line,
                        reason: "sample rows must leave kernel and freq_mhz empty".into(),
                    });
                }
                let channel = Channel::from_str(fields[2]).ok_or_else(|| TraceError::MalformedRow {
                    line,
                    reason: format!("unknown channel {:?}", fields[2]),
                })?;
                let power = parse_f64(fields[3], line, "power")?;
                if power < 0.0 {
                    return Err(TraceError::MalformedRow { line, reason: "negative power".into() });
                }
                if let Some(&prev) = last_t.get(&channel) {
                    if !(t > prev) {
                        return Err(TraceError::NonMonotoneTimestamps { line, channel });
                    }
                }
                last_t.insert(channel, t);
                samples.push(PowerSample { t, channel, power });
            }
            kind @ ("begin" | "end") => {
                if !fields[2].is_empty() || !fields[3].is_empty() {
                    return Err(TraceError::MalformedRow {
                        line,
                        reason: "marker rows must leave channel and value empty".into(),
                    });
                }
                if fields[4].is_empty() {
                    return Err(TraceError::MalformedRow { line, reason: "empty kernel name".into() });
                }
                let freq = parse_f64(fields[5], line, "frequency")?;
                let kind = if kind == "begin" { MarkerKind::Begin } else { MarkerKind::End };
                markers.push((Marker { t, kernel: fields[4].to_string(), kind, freq }, line));
            }
            other => {
                return Err(TraceError::MalformedRow {
                    line,
                    reason: format!("unknown record kind {other:?}"),
                });
            }
        }
    }
    if !seen_header {
        return Err(TraceError::MalformedRow { line: text.lines().count().max(1), reason: "missing header".into() });
    }
    let sample_rate = sample_rate.ok_or(TraceError::MissingSampleRate)?;
    // Check marker pairing with line numbers before the structural pass.
    let mut by_kernel: BTreeMap<&str, Vec<(&Marker, usize)>> = BTreeMap::new();
    for (m, line) in &markers {
        by_kernel.entry(m.kernel.as_str()).or_default().push((m, *line));
    }
    for (kernel, mut ms) in by_kernel {
        ms.sort_by(|a, b| a.0.t.total_cmp(&b.0.t).then(marker_rank(a.0.kind).cmp(&marker_rank(b.0.kind))));
        let mut open = false;
        let mut last_line = 0;
        for (m, line) in ms {
            last_line = line;
            match (m.kind, open) {
                (MarkerKind::Begin, false) => open = true,
                (MarkerKind::End, true) => open = false,
                _ => return Err(TraceError::UnbalancedMarkers { kernel: kernel.into(), line }),
            }
        }
        if open {
            return Err(TraceError::UnbalancedMarkers { kernel: kernel.into(), line: last_line });
        }
    }
    PowerTrace::new(samples, markers.into_iter().map(|(m, _)| m).collect(), sample_rate, meta)
}

/// Render a sweep table as CSV, with optional `# key=value` comments first.
pub fn emit_sweep(table: &SweepTable, comments: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    push_meta_comments(&mut out, comments);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for (kernel, rows) in &table.kernels {
        for r in rows {
            let _ = writeln!(out, "{kernel},{},{},{},{}", r.freq, r.t_s, r.e_s, r.p_avg);
        }
    }
    out
}

/// Parse sweep CSV (comments are skipped; the header is mandatory).
pub fn parse_sweep(text: &str) -> Result<SweepTable, TraceError> {
    let mut table = SweepTable::default();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.starts_with('#') || raw.is_empty() {
            continue;
        }
        if !seen_header {
            if raw != SWEEP_HEADER {
                return Err(TraceError::MalformedRow {
                    line,
                    reason: format!("expected header {SWEEP_HEADER:?}, got {raw:?}"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(TraceError::MalformedRow {
                line,
                reason: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        if fields[0].is_empty() {
            return Err(TraceError::MalformedRow { line, reason: "empty kernel name".into() });
        }
        let point = SweepPoint {
            freq: parse_f64(fields[1], line, "frequency")?,
            t_s: parse_f64(fields[2], line, "duration")?,
            e_s: parse_f64(fields[3], line, "energy")?,
            p_avg: parse_f64(fields[4], line, "power")?,
        };
        table.kernels.entry(fields[0].to_string()).or_default().push(point);
    }
    if !seen_header {
        return Err(TraceError::MalformedRow { line: 1, reason: "missing header".into() });
    }
    table.validate()?;
    Ok(table)
}

// ============================================================================
