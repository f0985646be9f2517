//! Regenerates `src/inference/tf_table.rs`.
//!
//! cargo run --release -p ivdiag --example gen_tf_table > crates/core/src/inference/tf_table.rs

use ivdiag::inference::tf::{derive_critical_curve, tabulate, FINE_STEP, TABLE_KNOTS};

fn main() {
    println!("// Generated by `cargo run --release -p ivdiag --example gen_tf_table`.");
    println!("// Worst-case (|rho| = 1) tF critical values c(F); see `tf::derive_critical_curve`.");
    println!();
    println!("use super::tf::TfTable;");
    for (name, alpha) in [("TABLE_05", 0.05), ("TABLE_01", 0.01)] {
        let curve = derive_critical_curve(alpha, FINE_STEP);
        let knots = tabulate(&curve, TABLE_KNOTS);
        println!();
        println!("pub(super) const {name}: TfTable = TfTable {{");
        println!("    alpha: {alpha:?},");
        println!("    knots: &[");
        for (f, c) in knots {
            println!("        ({f:?}, {c:?}),");
        }
        println!("    ],");
        println!("}};");
    }
}
