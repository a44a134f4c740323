//! Segments a curve into gestures and places each on the duration x ratio grid.
//!
//! Run with `cargo run --example gesture_taxonomy`.

use pedal_eval::gesture::gestures_csv;
use pedal_eval::synth::{gen_gesture, GestureSpec};
use pedal_eval::{gesture_distribution, segment_gestures, GestureCategory, GestureConfig};

fn main() -> pedal_eval::Result<()> {
    let mut curve = vec![0.0; 30];
    for (i, category) in GestureCategory::SHAPES.into_iter().enumerate() {
        let spec = GestureSpec::sample(category, i as u64)?;
        curve.extend(gen_gesture(&spec)?);
        curve.extend(vec![0.0; 30]);
    }

    let config = GestureConfig::default();
    let seg = segment_gestures(&curve, &config);
    for g in &seg.gestures {
        println!(
            "{:<9} frames {:>4}..{:<4} duration {:>3}  max {:.2}  ratio {:.2}",
            g.category.name(),
            g.start_frame,
            g.end_frame,
            g.duration_frames(),
            g.max_depth,
            g.max_depth_ratio
        );
    }
    print!("\n{}", gestures_csv(&seg.gestures));

    println!("\nshare of frames:");
    for (category, share) in gesture_distribution(&curve, &config) {
        println!("  {category:<9} {share:.3}");
    }
    Ok(())
}
