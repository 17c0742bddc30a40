// Pseudospectral terms against brute-force convolution, and IMEX local error orders.

use tt_flock::experiments::oracle::oracle_smallgrid;
use tt_flock::spectral::Dealias;

fn main() {
    let r = oracle_smallgrid(2, 8, 0, Dealias::OneHalf).unwrap();
    println!(
        "max term error {:.2e}, commutator error {:.2e}",
        r.max_term_error, r.commutator_error
    );
    for c in &r.imex {
        println!(
            "{} {}: one-step order {:.2} (linear {:.2})",
            c.model, c.scheme, c.full_order, c.linear_order
        );
    }
    println!("pass: {}", r.pass);
}
