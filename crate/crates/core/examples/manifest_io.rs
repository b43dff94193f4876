//! Writing and reading manifests and reports.
//!
//! Run with `cargo run --example manifest_io`.

use clusterface::clustering::run_salient_clustering;
use clusterface::config::PipelineConfig;
use clusterface::eval::{generate_synthetic, SyntheticSpec};
use clusterface::io::{load_manifest, render_report, write_manifest, Format};
use clusterface::space::FaceSpace;

fn main() -> clusterface::error::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| clusterface::error::Error::Io {
        path: std::env::temp_dir(),
        source: e,
    })?;
    let path = dir.path().join("sets.jsonl");

    let spec = SyntheticSpec {
        identities: 3,
        sets_per_identity: 2,
        dimension: 4,
        faces_per_set: 1,
        ..SyntheticSpec::default()
    };
    write_manifest(&generate_synthetic(&spec)?.sets, &path)?;
    let text = std::fs::read_to_string(&path).expect("just written");
    println!("first manifest line:\n{}", text.lines().next().unwrap_or_default());

    let sets = load_manifest(&path)?;
    println!("read back {} sets", sets.len());

    let space = FaceSpace::new(sets)?;
    let result = run_salient_clustering(&space, &PipelineConfig::default())?;
    print!("merge log as CSV:\n{}", render_report(&result, Format::Csv));
    Ok(())
}
