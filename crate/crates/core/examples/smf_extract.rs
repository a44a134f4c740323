//! Builds a two-track MIDI file with a tempo change and reads the sustain
//! pedal back as a 100 Hz curve.
//!
//! Run with `cargo run --example smf_extract [file.mid]`.

use pedal_eval::extract_cc64;
use pedal_eval::smf::{parse, SmfWriter, TrackWriter};

fn main() -> pedal_eval::Result<()> {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(&path).map_err(|source| pedal_eval::PedalError::Io {
            path: path.into(),
            source,
        })?,
        None => SmfWriter::new(1, 480)
            .track(
                TrackWriter::new()
                    .tempo(0, 500_000)
                    .tempo(960, 250_000)
                    .end_of_track(960),
            )
            .track(
                TrackWriter::new()
                    .with_running_status()
                    .note_on(0, 0, 60, 90)
                    .sustain(120, 0, 127)
                    .sustain(600, 0, 64)
                    .note_off(240, 0, 60)
                    .sustain(480, 0, 0)
                    .end_of_track(0),
            )
            .to_bytes(),
    };

    let smf = parse(&bytes)?;
    println!(
        "format {}, {} tracks, division {:?}",
        smf.format,
        smf.tracks.len(),
        smf.division
    );

    let curve = extract_cc64(&bytes, 100.0)?;
    println!("{} frames ({:.2} s)", curve.len(), curve.duration_seconds());
    let mut last = f64::NAN;
    for (i, &v) in curve.values().iter().enumerate() {
        if v != last {
            println!("  frame {i:>4} ({:.2} s): depth {v:.4}", i as f64 / 100.0);
            last = v;
        }
    }
    Ok(())
}
