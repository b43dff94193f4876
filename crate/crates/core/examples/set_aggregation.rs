//! Building face sets from per-face embeddings and comparing them.
//!
//! Run with `cargo run --example set_aggregation`.

use clusterface::embedding::{aggregate_set, cosine_distance, Embedding, FaceMember, FaceSet};

fn main() -> clusterface::error::Result<()> {
    // Two frames of one track; the sharper detection counts for more.
    let members = vec![
        FaceMember::new(Embedding::new(vec![1.0, 0.0, 0.0])?, Some(0.9)),
        FaceMember::new(Embedding::new(vec![0.0, 1.0, 0.0])?, Some(0.3)),
    ];
    let weighted = aggregate_set(&members)?;
    println!("score-weighted representative: {:?}", weighted.as_slice());

    // A missing score anywhere falls back to a plain average.
    let unscored = vec![
        FaceMember::new(Embedding::new(vec![1.0, 0.0, 0.0])?, Some(0.9)),
        FaceMember::new(Embedding::new(vec![0.0, 1.0, 0.0])?, None),
    ];
    println!("uniform representative:        {:?}", aggregate_set(&unscored)?.as_slice());

    let track = FaceSet::new("track-1", Some("alice".into()), members)?;
    let photo = FaceSet::single("photo-7", Some("alice".into()), vec![0.8, 0.6, 0.1])?;
    let d = cosine_distance(track.representative(), photo.representative())?;
    println!("distance {} <-> {}: {d:.4}", track.set_id(), photo.set_id());

    // Non-finite and zero vectors never make it into a set.
    assert!(Embedding::new(vec![0.0, 0.0, 0.0]).is_err());
    assert!(Embedding::new(vec![f64::NAN, 1.0, 0.0]).is_err());
    Ok(())
}
