//! Binding, bundling, permutation and capping on small hypervectors.

use hdrank::{HvSeed, Hypervector};

fn main() -> hdrank::Result<()> {
    let dim = 10_000;
    let a = Hypervector::random_bipolar(&HvSeed::new(1, "a"), dim)?;
    let b = Hypervector::random_bipolar(&HvSeed::new(1, "b"), dim)?;

    println!("cos(a, b)            = {:+.4}", a.cosine(&b)?.value);

    let bound = a.bind(&b)?;
    println!("cos(a*b, a)          = {:+.4}", bound.cosine(&a)?.value);
    println!("(a*b)*b == a         : {}", bound.bind(&b)? == a);

    let bundle = a.add(&b)?;
    println!("cos(a+b, a)          = {:+.4}", bundle.cosine(&a)?.value);

    let shifted = a.permute(1);
    println!("cos(rho(a), a)       = {:+.4}", shifted.cosine(&a)?.value);
    println!("rho^-1(rho(a)) == a  : {}", shifted.permute(-1) == a);

    let capped = bundle.add(&a)?.cap_bipolarize();
    let distinct: std::collections::BTreeSet<i64> = capped.as_slice().iter().map(|x| *x as i64).collect();
    println!("cap(a+b+a) values    : {distinct:?}");

    let tiny = Hypervector::from_vec(vec![1.0, 2.0, 3.0, 4.0])?;
    println!("permute([1,2,3,4], 1) = {:?}", tiny.permute(1).as_slice());
    Ok(())
}
