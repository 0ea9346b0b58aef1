//! Particles spread through a sheet of thickness 20: the fit keeps every
//! depth inside the sheet and recovers their order.
//!
//! `cargo run --example sheet_calibration`

use lasersheet::optimize::{
    build_sheet_problem, count_dof, gauge_align, initial_guess_from_cameras, spearman, BundleOptions,
    SheetModel, SolverOptions,
};
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair};

fn main() -> lasersheet::Result<()> {
    let depth = 20.0;
    let cams = vergence_pair(1000.0, 200, 150, (40.0, 0.0), 11f64.to_radians())?;
    let (truth, _) = generate_scene(&scene_spec(cams, 200, 150, 18, depth, 5))?;
    let (_, obs) = truth.common_observations();
    let (unknowns, equations) = count_dof(2, obs.len());
    println!("{unknowns} unknowns, {equations} equations");

    let sheet = SheetModel::canonical(depth);
    let init = initial_guess_from_cameras(truth.cameras.clone(), &obs, Some(&sheet))?;
    let res =
        build_sheet_problem(obs, &sheet, &init, BundleOptions::default())?.solve(&SolverOptions::default())?;

    let (t, _) = gauge_align(&res.points, &truth.points)?;
    let z: Vec<f64> = res.points.iter().map(|p| t.apply(p).z).collect();
    let zt: Vec<f64> = truth.points.iter().map(|p| p.z).collect();
    println!(
        "reprojection rms {:.2e} px, depth rank correlation {:.3}",
        res.rms_px,
        spearman(&z, &zt)
    );
    Ok(())
}
