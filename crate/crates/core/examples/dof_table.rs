//! Unknowns and equations of the sheet problem for a few setups.
//!
//! `cargo run --example dof_table`

use lasersheet::optimize::count_dof;

fn main() {
    println!("cameras particles unknowns equations");
    for (m, n) in [(2, 18), (3, 9), (4, 8), (5, 7)] {
        let (u, e) = count_dof(m, n);
        println!("{m:7} {n:9} {u:8} {e:9}");
    }
}
