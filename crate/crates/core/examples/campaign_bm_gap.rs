//! The `bm_gap` preset campaign run from the library: spectrum, widths,
//! entropy, fits and verdicts, written to a directory under the system temp dir.

use nwidth::lab::{preset, Lab};

fn main() -> nwidth::Result<()> {
    let mut cfg = preset("bm_gap")?;
    let out = std::env::temp_dir().join("nwidth-bm-gap");
    cfg.run.out = Some(out.display().to_string());
    let lab = Lab::new(cfg)?;
    let mut em = lab.emitter("campaign")?;
    let report = lab.campaign(&mut em)?;
    let manifest = em.finish()?;
    print!("{}", report.render());
    println!("files in {}: {:?}", out.display(), manifest.files);
    Ok(())
}
