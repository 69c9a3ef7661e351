//! Per-sample noise: every RGB sample draws from its own counter-indexed generator.

use rand_distr::{Distribution, Poisson, StandardNormal};

use super::buffer::quantize;
use super::Ctx;
use crate::raster::Image;

fn map_samples(img: &Image, ctx: &Ctx<'_>, mut f: impl FnMut(f64, &mut super::rng::CounterRng) -> f64) -> Image {
    let stream = ctx.stream(0);
    let data = img
        .as_bytes()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut rng = stream.at(i as u64);
            quantize(f(f64::from(*v) / 255.0, &mut rng))
        })
        .collect();
    Image::new(img.width(), img.height(), data).expect("same shape")
}

pub(super) fn gaussian(img: &Image, ctx: &Ctx<'_>) -> Image {
    let sigma = ctx.param("sigma");
    map_samples(img, ctx, |x, rng| {
        let z: f64 = StandardNormal.sample(rng);
        x + sigma * z
    })
}

pub(super) fn shot(img: &Image, ctx: &Ctx<'_>) -> Image {
    let photons = ctx.param("photons");
    map_samples(img, ctx, |x, rng| {
        let lambda = x * photons;
        if lambda <= 0.0 {
            return 0.0;
        }
        match Poisson::new(lambda) {
            Ok(p) => p.sample(rng) / photons,
            Err(_) => x,
        }
    })
}

pub(super) fn impulse(img: &Image, ctx: &Ctx<'_>) -> Image {
    let amount = ctx.param("amount");
    map_samples(img, ctx, |x, rng| {
        if rng.next_f64() < amount {
            if rng.next_f64() < 0.5 {
                0.0
            } else {
                1.0
            }
        } else {
            x
        }
    })
}

pub(super) fn speckle(img: &Image, ctx: &Ctx<'_>) -> Image {
    let sigma = ctx.param("sigma");
    map_samples(img, ctx, |x, rng| {
        let z: f64 = StandardNormal.sample(rng);
        x + x * sigma * z
    })
}
