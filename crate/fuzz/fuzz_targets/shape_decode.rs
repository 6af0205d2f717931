#![no_main]

use fspq_core::compositions::Shape;
use fspq_core::wire::{Reader, Writer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let mut r = Reader::new(data);
    if let Ok(shape) = Shape::decode(&mut r) {
        let _ = shape.capacity();
        let _ = shape.base_signatures();
        let mut w = Writer::new();
        shape.encode(&mut w);
        assert_eq!(&w.into_bytes()[..], &data[..data.len() - r.remaining()]);
    }
});
