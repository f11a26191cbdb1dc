#![no_main]

use libfuzzer_sys::fuzz_target;

// Input layout: node count, base point, then little-endian f64 weights
// followed by (i, j, conductance, length) records.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let n = (data[0] % 32) as usize;
    let base = data[1] as usize;
    let mut floats = data[2..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let weights: Vec<f64> = floats.by_ref().take(n).collect();
    let rest: Vec<f64> = floats.collect();
    let edges: Vec<(usize, usize, f64, f64)> = rest
        .chunks_exact(4)
        .map(|e| (e[0].abs() as usize % 40, e[1].abs() as usize % 40, e[2], e[3]))
        .collect();
    if let Ok(m) = varlab::geometry::from_edges(weights, &edges, base) {
        let _ = varlab::forms::OperatorPair::free(&m);
    }
});
