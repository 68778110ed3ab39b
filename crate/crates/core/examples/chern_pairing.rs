//! Odd Chern character against the circle module F = iH + E, compared with
//! the winding index.

use fredholm_lab::chern::chern_odd_circle;
use fredholm_lab::circle::FourierSymbol;
use fredholm_lab::fredholm::index_by_winding;

fn main() -> fredholm_lab::Result<()> {
    println!(
        "{:<22} {:>2} {:>22} {:>10} {:>8}",
        "u", "n", "raw trace", "pairing", "index"
    );
    for text in ["z", "z^2", "z^-3", "2*z + 0.5", "z + 0.3*z^-1"] {
        let u: FourierSymbol = text.parse()?;
        let index = index_by_winding(&u)?.index;
        for n in [1, 3] {
            let eval = chern_odd_circle(&u, n)?;
            println!(
                "{:<22} {:>2} {:>22.6} {:>10.6} {:>8}",
                text, n, eval.raw_trace.re, eval.predicted_index.re, index
            );
        }
    }
    Ok(())
}
