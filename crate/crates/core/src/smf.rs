//! Standard MIDI File reading, reduced to what sustain-pedal extraction needs.
//!
//! Supports format 0 and 1 files with metrical (ticks per quarter note) or
//! SMPTE time division, running status, sysex, and Set Tempo meta events.
//! [`SmfWriter`] produces small files for fixtures and demos.

use crate::curve::{frames_covering, sample_and_hold, PedalCurve};
use crate::error::{PedalError, Result};

/// Controller number of the sustain (damper) pedal.
pub const SUSTAIN_CONTROLLER: u8 = 64;

const DEFAULT_TEMPO_US_PER_QUARTER: u32 = 500_000;
const META_SET_TEMPO: u8 = 0x51;
const META_END_OF_TRACK: u8 = 0x2F;

/// Time division field of the `MThd` chunk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Division {
    TicksPerQuarter(u16),
    /// SMPTE frames per second (29.97 for drop-frame) and ticks per frame.
    Smpte {
        frames_per_second: f64,
        ticks_per_frame: u8,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// Channel voice message; `data2` is 0 for one-byte messages.
    Channel {
        status: u8,
        data1: u8,
        data2: u8,
    },
    Meta {
        kind: u8,
        data: Vec<u8>,
    },
    Sysex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackEvent {
    /// Absolute time in ticks from the start of the track.
    pub tick: u64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smf {
    pub format: u16,
    pub division: Division,
    pub tracks: Vec<Vec<TrackEvent>>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn truncated(&self, what: &str) -> PedalError {
        PedalError::Format {
            offset: self.pos,
            message: format!("unexpected end of data while reading {what}"),
        }
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| self.truncated(what))?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| self.truncated(what))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self, what: &str) -> Result<u32> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.u8(what)?;
            value = (value << 7) | u32::from(b & 0x7F);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(PedalError::Format {
            offset: start,
            message: format!("variable-length quantity longer than 4 bytes in {what}"),
        })
    }
}

fn parse_division(raw: u16) -> Result<Division> {
    if raw & 0x8000 == 0 {
        if raw == 0 {
            return Err(PedalError::Format {
                offset: 12,
                message: "division of 0 ticks per quarter note".into(),
            });
        }
        return Ok(Division::TicksPerQuarter(raw));
    }
    let code = (raw >> 8) as u8 as i8;
    let ticks_per_frame = (raw & 0xFF) as u8;
    let frames_per_second = match -i16::from(code) {
        24 => 24.0,
        25 => 25.0,
        29 => 30_000.0 / 1001.0,
        30 => 30.0,
        other => {
            return Err(PedalError::Unsupported(format!(
                "SMPTE division with frame code {other}"
            )))
        }
    };
    if ticks_per_frame == 0 {
        return Err(PedalError::Unsupported(
            "SMPTE division with 0 ticks per frame".into(),
        ));
    }
    Ok(Division::Smpte {
        frames_per_second,
        ticks_per_frame,
    })
}

fn parse_track(cur: &mut Cursor<'_>, end: usize) -> Result<Vec<TrackEvent>> {
    let mut events = Vec::new();
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    while cur.pos < end {
        tick += u64::from(cur.vlq("delta time")?);
        let status_pos = cur.pos;
        let first = cur.u8("event status")?;
        let kind = match first {
            0xFF => {
                running = None;
                let kind = cur.u8("meta type")?;
                let len = cur.vlq("meta length")? as usize;
                let data = cur.take(len, "meta data")?.to_vec();
                EventKind::Meta { kind, data }
            }
            0xF0 | 0xF7 => {
                running = None;
                let len = cur.vlq("sysex length")? as usize;
                cur.take(len, "sysex data")?;
                EventKind::Sysex
            }
            0xF1..=0xFE => {
                return Err(PedalError::Format {
                    offset: status_pos,
                    message: format!("system message 0x{first:02X} is not valid in a file"),
                })
            }
            _ => {
                let (status, data1) = if first & 0x80 != 0 {
                    running = Some(first);
                    (first, cur.u8("channel data")?)
                } else {
                    let status = running.ok_or_else(|| PedalError::Format {
                        offset: status_pos,
                        message: "data byte without running status".into(),
                    })?;
                    (status, first)
                };
                let data2 = match status & 0xF0 {
                    0xC0 | 0xD0 => 0,
                    _ => cur.u8("channel data")?,
                };
                EventKind::Channel {
                    status,
                    data1,
                    data2,
                }
            }
        };
        if cur.pos > end {
            return Err(PedalError::Format {
                offset: status_pos,
                message: "event runs past the end of its track chunk".into(),
            });
        }
        let is_end = matches!(
            kind,
            EventKind::Meta {
                kind: META_END_OF_TRACK,
                ..
            }
        );
        events.push(TrackEvent { tick, kind });
        if is_end {
            break;
        }
    }
    cur.pos = end;
    Ok(events)
}

/// Parses the chunk structure and every track of a Standard MIDI File.
pub fn parse(bytes: &[u8]) -> Result<Smf> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "header magic")? != b"MThd" {
        return Err(PedalError::Format {
            offset: 0,
            message: "missing MThd header".into(),
        });
    }
    let header_len = cur.u32("header length")? as usize;
    if header_len < 6 {
        return Err(PedalError::Format {
            offset: 4,
            message: format!("header length {header_len} is shorter than 6"),
        });
    }
    let header_start = cur.pos;
    let format = cur.u16("format")?;
    let n_tracks = cur.u16("track count")?;
    let division = parse_division(cur.u16("division")?)?;
    cur.take(header_len - (cur.pos - header_start), "header padding")?;
    if format > 1 {
        return Err(PedalError::Unsupported(format!("SMF format {format}")));
    }

    let mut tracks = Vec::with_capacity(usize::from(n_tracks));
    while tracks.len() < usize::from(n_tracks) {
        let chunk_pos = cur.pos;
        let id = cur.take(4, "chunk id")?;
        let len = cur.u32("chunk length")? as usize;
        let end = cur
            .pos
            .checked_add(len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| PedalError::Format {
                offset: chunk_pos,
                message: format!("chunk declares {len} bytes but the file ends first"),
            })?;
        if id == b"MTrk" {
            tracks.push(parse_track(&mut cur, end)?);
        } else {
            // Unknown chunk types are skipped.
            cur.pos = end;
        }
    }
    Ok(Smf {
        format,
        division,
        tracks,
    })
}

/// Converts absolute ticks to seconds using every Set Tempo event in the file.
#[derive(Debug, Clone)]
pub struct TempoMap {
    division: Division,
    /// `(tick, seconds at tick, microseconds per quarter from tick on)`.
    segments: Vec<(u64, f64, u32)>,
}

impl TempoMap {
    pub fn new(smf: &Smf) -> Self {
        let mut changes: Vec<(u64, usize, usize, u32)> = Vec::new();
        for (t, track) in smf.tracks.iter().enumerate() {
            for (i, ev) in track.iter().enumerate() {
                if let EventKind::Meta {
                    kind: META_SET_TEMPO,
                    data,
                } = &ev.kind
                {
                    if data.len() == 3 {
                        let us = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                        changes.push((ev.tick, t, i, us));
                    }
                }
            }
        }
        changes.sort_by_key(|&(tick, t, i, _)| (tick, t, i));

        let ppq = match smf.division {
            Division::TicksPerQuarter(ppq) => f64::from(ppq),
            Division::Smpte { .. } => 1.0,
        };
        let mut segments = vec![(0u64, 0.0f64, DEFAULT_TEMPO_US_PER_QUARTER)];
        for (tick, _, _, us) in changes {
            let &(last_tick, last_sec, last_us) = segments.last().expect("non-empty");
            let sec = last_sec + (tick - last_tick) as f64 * f64::from(last_us) / (1e6 * ppq);
            if tick == last_tick {
                segments.pop();
            }
            segments.push((tick, sec, us));
        }
        Self {
            division: smf.division,
            segments,
        }
    }

    pub fn seconds(&self, tick: u64) -> f64 {
        match self.division {
            Division::Smpte {
                frames_per_second,
                ticks_per_frame,
            } => tick as f64 / (frames_per_second * f64::from(ticks_per_frame)),
            Division::TicksPerQuarter(ppq) => {
                let idx = self.segments.partition_point(|s| s.0 <= tick) - 1;
                let (t0, s0, us) = self.segments[idx];
                s0 + (tick - t0) as f64 * f64::from(us) / (1e6 * f64::from(ppq))
            }
        }
    }
}

/// Extracts the sustain pedal (CC64, any channel) as a sampled depth curve.
///
/// Pedal events from all tracks are merged by time; at equal times the event
/// later in the file wins. Depth is `value / 127`, held until the next event,
/// 0 before the first one, and sampled from `t = 0` to the last event of any
/// kind.
pub fn extract_cc64(bytes: &[u8], frame_rate_hz: f64) -> Result<PedalCurve> {
    crate::curve::check_rate(frame_rate_hz)?;
    let smf = parse(bytes)?;
    let tempo = TempoMap::new(&smf);

    let mut pedal: Vec<(u64, usize, usize, u8)> = Vec::new();
    let mut last_tick = 0u64;
    for (t, track) in smf.tracks.iter().enumerate() {
        for (i, ev) in track.iter().enumerate() {
            last_tick = last_tick.max(ev.tick);
            if let EventKind::Channel {
                status,
                data1,
                data2,
            } = ev.kind
            {
                if status & 0xF0 == 0xB0 && data1 == SUSTAIN_CONTROLLER {
                    pedal.push((ev.tick, t, i, data2));
                }
            }
        }
    }
    pedal.sort_by_key(|&(tick, t, i, _)| (tick, t, i));
    let events: Vec<(f64, f64)> = pedal
        .iter()
        .map(|&(tick, _, _, v)| (tempo.seconds(tick), f64::from(v.min(127)) / 127.0))
        .collect();

    let n = frames_covering(tempo.seconds(last_tick), frame_rate_hz);
    PedalCurve::new(
        frame_rate_hz,
        sample_and_hold(&events, n, frame_rate_hz),
        "",
    )
}

fn write_vlq(out: &mut Vec<u8>, mut value: u32) {
    let mut buf = [0u8; 4];
    let mut n = 0;
    loop {
        buf[n] = (value & 0x7F) as u8;
        n += 1;
        value >>= 7;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(if i > 0 { buf[i] | 0x80 } else { buf[i] });
    }
}

/// Minimal SMF writer for building fixtures.
#[derive(Debug, Clone)]
pub struct SmfWriter {
    format: u16,
    division: u16,
    tracks: Vec<Vec<u8>>,
}

/// Builder for one `MTrk` chunk; deltas are in ticks since the previous event.
#[derive(Debug, Clone, Default)]
pub struct TrackWriter {
    data: Vec<u8>,
    running_status: bool,
    last_status: Option<u8>,
}

impl SmfWriter {
    pub fn new(format: u16, ticks_per_quarter: u16) -> Self {
        Self {
            format,
            division: ticks_per_quarter,
            tracks: Vec::new(),
        }
    }

    /// SMPTE timing; `frame_code` is 24, 25, 29, or 30.
    pub fn smpte(format: u16, frame_code: u8, ticks_per_frame: u8) -> Self {
        let hi = (-(frame_code as i8)) as u8;
        Self {
            format,
            division: u16::from_be_bytes([hi, ticks_per_frame]),
            tracks: Vec::new(),
        }
    }

    pub fn track(mut self, track: TrackWriter) -> Self {
        self.tracks.push(track.data);
        self
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"MThd");
        out.extend_from_slice(&6u32.to_be_bytes());
        out.extend_from_slice(&self.format.to_be_bytes());
        out.extend_from_slice(&(self.tracks.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.division.to_be_bytes());
        for t in &self.tracks {
            out.extend_from_slice(b"MTrk");
            out.extend_from_slice(&(t.len() as u32).to_be_bytes());
            out.extend_from_slice(t);
        }
        out
    }
}

impl TrackWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Omit repeated channel status bytes from here on.
    pub fn with_running_status(mut self) -> Self {
        self.running_status = true;
        self
    }

    fn channel(mut self, delta: u32, status: u8, data: &[u8]) -> Self {
        write_vlq(&mut self.data, delta);
        if !(self.running_status && self.last_status == Some(status)) {
            self.data.push(status);
        }
        self.last_status = Some(status);
        self.data.extend_from_slice(data);
        self
    }

    fn meta(mut self, delta: u32, kind: u8, payload: &[u8]) -> Self {
        write_vlq(&mut self.data, delta);
        self.data.extend_from_slice(&[0xFF, kind]);
        write_vlq(&mut self.data, payload.len() as u32);
        self.data.extend_from_slice(payload);
        self.last_status = None;
        self
    }

    pub fn control_change(self, delta: u32, channel: u8, controller: u8, value: u8) -> Self {
        self.channel(delta, 0xB0 | (channel & 0x0F), &[controller, value])
    }

    pub fn sustain(self, delta: u32, channel: u8, value: u8) -> Self {
        self.control_change(delta, channel, SUSTAIN_CONTROLLER, value)
    }

    pub fn note_on(self, delta: u32, channel: u8, key: u8, velocity: u8) -> Self {
        self.channel(delta, 0x90 | (channel & 0x0F), &[key, velocity])
    }

    pub fn note_off(self, delta: u32, channel: u8, key: u8) -> Self {
        self.channel(delta, 0x80 | (channel & 0x0F), &[key, 0])
    }

    pub fn program_change(self, delta: u32, channel: u8, program: u8) -> Self {
        self.channel(delta, 0xC0 | (channel & 0x0F), &[program])
    }

    pub fn tempo(self, delta: u32, us_per_quarter: u32) -> Self {
        let b = us_per_quarter.to_be_bytes();
        self.meta(delta, META_SET_TEMPO, &b[1..])
    }

    pub fn sysex(mut self, delta: u32, payload: &[u8]) -> Self {
        write_vlq(&mut self.data, delta);
        self.data.push(0xF0);
        write_vlq(&mut self.data, payload.len() as u32);
        self.data.extend_from_slice(payload);
        self.last_status = None;
        self
    }

    pub fn end_of_track(self, delta: u32) -> Self {
        self.meta(delta, META_END_OF_TRACK, &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vlq_encoding() {
        let cases: [(u32, &[u8]); 5] = [
            (0, &[0x00]),
            (0x7F, &[0x7F]),
            (0x80, &[0x81, 0x00]),
            (0x2000, &[0xC0, 0x00]),
            (0x0FFF_FFFF, &[0xFF, 0xFF, 0xFF, 0x7F]),
        ];
        for (value, bytes) in cases {
            let mut out = Vec::new();
            write_vlq(&mut out, value);
            assert_eq!(out, bytes);
            let mut cur = Cursor {
                bytes: &out,
                pos: 0,
            };
            assert_eq!(cur.vlq("t").unwrap(), value);
        }
    }

    #[test]
    fn single_pedal_event_fills_curve() {
        // 480 ticks/quarter at the default 120 bpm: 960 ticks = 1 s.
        let bytes = SmfWriter::new(0, 480)
            .track(TrackWriter::new().sustain(0, 0, 127).end_of_track(960))
            .to_bytes();
        let c = extract_cc64(&bytes, 100.0).unwrap();
        assert_eq!(c.len(), 101);
        assert!(c.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn no_pedal_events_gives_zeros() {
        let bytes = SmfWriter::new(0, 480)
            .track(
                TrackWriter::new()
                    .note_on(0, 0, 60, 90)
                    .note_off(480, 0, 60)
                    .end_of_track(0),
            )
            .to_bytes();
        let c = extract_cc64(&bytes, 100.0).unwrap();
        assert_eq!(c.len(), 51);
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_pedal_value() {
        let bytes = SmfWriter::new(0, 96)
            .track(TrackWriter::new().sustain(0, 3, 64).end_of_track(96))
            .to_bytes();
        let c = extract_cc64(&bytes, 100.0).unwrap();
        assert_eq!(c.values()[0], 64.0 / 127.0);
        assert!((c.values()[0] - 0.50394).abs() < 1e-5);
    }

    #[test]
    fn bad_magic_and_truncation() {
        match parse(b"RIFF\0\0\0\x06") {
            Err(PedalError::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
        let mut bytes = SmfWriter::new(0, 480)
            .track(TrackWriter::new().sustain(0, 0, 127).end_of_track(960))
            .to_bytes();
        bytes.truncate(bytes.len() - 3);
        match parse(&bytes) {
            Err(PedalError::Format { offset, .. }) => assert_eq!(offset, 14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsupported_smpte_code() {
        let mut bytes = SmfWriter::new(0, 480)
            .track(TrackWriter::new().end_of_track(0))
            .to_bytes();
        bytes[12] = (-23i8) as u8;
        bytes[13] = 40;
        assert!(matches!(parse(&bytes), Err(PedalError::Unsupported(_))));
    }

    #[test]
    fn data_byte_without_status_is_rejected() {
        let mut w = SmfWriter::new(0, 480);
        w.tracks.push(vec![0x00, 0x40, 0x7F]);
        match parse(&w.to_bytes()) {
            Err(PedalError::Format { offset, .. }) => assert_eq!(offset, 23),
            other => panic!("unexpected {other:?}"),
        }
    }
}
