//! Index of a Toeplitz operator by the winding number and by finite sections.
//!
//! `cargo run --example toeplitz_index -- "z^2 - 2.5*z + 1"`

use fredholm_lab::circle::FourierSymbol;
use fredholm_lab::fredholm::{index_by_winding, routes_agree, toeplitz_index_by_stabilization, StabilizationConfig};

fn main() -> fredholm_lab::Result<()> {
    let symbols: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => ["z^3", "z^-2", "2 + z - 0.5*z^-2", "z^2 - 2.5*z + 1"]
            .map(String::from)
            .to_vec(),
    };
    for text in symbols {
        let f: FourierSymbol = text.parse()?;
        let winding = index_by_winding(&f)?;
        let bw = f.bandwidth();
        let sections = toeplitz_index_by_stabilization(&f, &[32, 64, 128], &StabilizationConfig::for_symbol(bw, bw))?;
        println!("f = {f}");
        println!("  winding route:  {}", winding.index);
        println!("  section route:  {}", sections.index);
        println!("  agree: {}", routes_agree(&[winding, sections.clone()]));
        println!("     N  ker  coker  (raw ker, raw coker)");
        for e in &sections.evidence {
            println!(
                "  {:>4}  {:>3}  {:>5}  ({}, {})",
                e.scale, e.kernel_dim, e.cokernel_dim, e.raw_kernel_dim, e.raw_cokernel_dim
            );
        }
    }
    Ok(())
}
