//! `materials`: validate the configured dispersion table and echo it as CSV,
//! with a summary of the electrical endpoints on stdout.

use pxbar_core::materials::MATERIAL_CSV_HEADER;

use crate::config::Experiment;
use crate::error::Result;
use crate::table::{sig12, OutFile};

pub fn run(exp: &Experiment) -> Result<()> {
    let material = &exp.spec.material;
    let mut out = OutFile::new(&exp.config_sha256, exp.seed, MATERIAL_CSV_HEADER);
    for row in &material.table {
        out.row(&[
            sig12(row.wavelength_nm),
            sig12(row.n_amorphous),
            sig12(row.k_amorphous),
            sig12(row.n_crystalline),
            sig12(row.k_crystalline),
        ]);
    }
    let path = exp.out_dir.join("materials.csv");
    out.write(&path)?;

    let (min_nm, max_nm) = material.span_nm();
    println!("material: {}", material.name);
    println!("rows: {}", material.table.len());
    println!("wavelength span: {min_nm} nm to {max_nm} nm");
    println!(
        "conductance endpoints: {} S amorphous, {} S crystalline",
        material.g_amorphous, material.g_crystalline
    );
    println!("wrote {}", path.display());
    Ok(())
}
