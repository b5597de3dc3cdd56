use certoset::hyper::{modulus_corpus, modulus_of_continuity};
use certoset::kernel::set_effort_ceiling;
use certoset::{Dyadic, Effort, Point};
use std::time::Instant;
fn main() {
    set_effort_ceiling(1 << 12);
    for (name, f) in modulus_corpus() {
        for (a, b) in [(0i64, 0i64), (3, 5), (-8, 2), (4, 4), (-20, 7)] {
            let x = Point::from_dyadics(vec![Dyadic::new(a, -4), Dyadic::new(b, -4)]);
            let t = Instant::now();
            let ok = f(&x).is_true_at(Effort(24));
            eprint!("{name} ({a},{b}) holds={ok} {:?}", t.elapsed());
            if ok {
                let t = Instant::now();
                let m = modulus_of_continuity(&*f, &x);
                eprint!(" m={m} {:?}", t.elapsed());
            }
            eprintln!();
        }
    }
}
