//! Encodes a few architectures with both schemes and compares them.

use hdrank::{ArchDescriptor, Encoder, ItemMemorySet, Scheme};

fn main() -> hdrank::Result<()> {
    // Codes 1..=3 per layer: head count and MLP ratio.
    let base = ArchDescriptor::from_codes(&[1, 2, 3, 1, 2, 3, 1, 2, 3, 1], &[3, 3, 3, 2, 2, 2, 1, 1, 1, 1])?;
    let one_layer_changed =
        ArchDescriptor::from_codes(&[1, 2, 3, 1, 2, 3, 1, 2, 3, 2], &[3, 3, 3, 2, 2, 2, 1, 1, 1, 1])?;
    let reversed = ArchDescriptor::new(base.layers().iter().rev().copied().collect())?;
    let deeper = ArchDescriptor::from_codes(&[2; 12], &[2; 12])?;

    let mems = ItemMemorySet::new(2023, 10_000)?;
    for scheme in [Scheme::Gram, Scheme::Record] {
        let enc = Encoder::new(scheme, mems.clone());
        let v = enc.encode(&base);
        println!("{scheme}:");
        for (name, other) in [
            ("one layer changed", &one_layer_changed),
            ("layers reversed", &reversed),
            ("all 2s, depth 12", &deeper),
        ] {
            println!("  cos(base, {name:<18}) = {:+.4}", v.cosine(&enc.encode(other))?.value);
        }
    }
    Ok(())
}
