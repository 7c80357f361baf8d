use ssns_core::sphere::{rotational_trace, write_trace, SphereGrid};
use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;
fn main() {
    for (nt, np) in [(16usize, 32usize), (24, 48)] {
        let g = Arc::new(SphereGrid::<f64>::new(nt, np).unwrap());
        let f = rotational_trace(g);
        let path = format!("fixtures/rotational_{nt}x{np}.txt");
        let w = BufWriter::new(File::create(&path).unwrap());
        write_trace(&f, w).unwrap();
        println!("wrote {path}");
    }
}
