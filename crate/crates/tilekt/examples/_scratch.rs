use num::bigint::BigInt;
use tilekt::exactmat::{snf, IntMatrix};

struct Rng(u64);
impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }
    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % ((hi - lo + 1) as u64)) as i64
    }
}

fn main() {
    let mut rng = Rng(0x5EED_0001);
    for case in 0..1000 {
        let rows = rng.range(0, 6) as usize;
        let cols = rng.range(0, 6) as usize;
        let data: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.range(-9, 9)).collect())
            .collect();
        let a = IntMatrix::from_rows(&data);
        eprintln!("case {case}: {a:?}");
        let s = snf(&a);
        assert_eq!(&(&s.p * &a) * &s.q, s.d);
        let _ = BigInt::from(0);
    }
    println!("all done");
}
