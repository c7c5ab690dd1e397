use super::pgm::GrayImage;
use super::DatasetError;

/// Block-mean reduction by an integer factor, rounding half up.
///
/// 112×92 with factor 4 gives 28×23.
pub fn downscale(img: &GrayImage, factor: usize) -> Result<GrayImage, DatasetError> {
    let (width, height) = (img.width(), img.height());
    if factor == 0 || width % factor != 0 || height % factor != 0 {
        return Err(DatasetError::NotDivisible { factor, width, height });
    }
    let (out_w, out_h) = (width / factor, height / factor);
    let count = (factor * factor) as u64;
    let mut pixels = Vec::with_capacity(out_w * out_h);
    for by in 0..out_h {
        for bx in 0..out_w {
            let mut sum = 0u64;
            for r in by * factor..(by + 1) * factor {
                for c in bx * factor..(bx + 1) * factor {
                    sum += u64::from(img.get(r, c));
                }
            }
            pixels.push(((sum + count / 2) / count) as u16);
        }
    }
    Ok(GrayImage::new(out_w, out_h, img.maxval(), pixels).expect("block means stay within maxval"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_image_is_unchanged_in_value() {
        let img = GrayImage::new(8, 4, 255, vec![8; 32]).unwrap();
        let small = downscale(&img, 4).unwrap();
        assert_eq!((small.width(), small.height()), (2, 1));
        assert_eq!(small.pixels(), &[8, 8]);
    }

    #[test]
    fn factor_one_is_identity() {
        let img = GrayImage::new(3, 2, 255, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(downscale(&img, 1).unwrap(), img);
    }

    #[test]
    fn mean_rounds_half_up() {
        let img = GrayImage::new(4, 4, 255, (0..16).collect()).unwrap();
        assert_eq!(downscale(&img, 4).unwrap().pixels(), &[8]);
    }

    #[test]
    fn orl_shape_reduces_to_644_pixels() {
        let img = GrayImage::new(92, 112, 255, vec![0; 92 * 112]).unwrap();
        let small = downscale(&img, 4).unwrap();
        assert_eq!((small.width(), small.height()), (23, 28));
        assert_eq!(small.pixels().len(), 644);
    }

    #[test]
    fn rejects_non_divisible() {
        let img = GrayImage::new(6, 4, 255, vec![0; 24]).unwrap();
        assert!(matches!(downscale(&img, 4), Err(DatasetError::NotDivisible { .. })));
        assert!(downscale(&img, 0).is_err());
    }

    proptest! {
        #[test]
        fn output_stays_within_input_range(
            (w, h, px) in (1..5usize, 1..5usize).prop_flat_map(|(bw, bh)| {
                let (w, h) = (bw * 3, bh * 3);
                (Just(w), Just(h), proptest::collection::vec(0..=255u16, w * h))
            })
        ) {
            let img = GrayImage::new(w, h, 255, px.clone()).unwrap();
            let out = downscale(&img, 3).unwrap();
            let (lo, hi) = (*px.iter().min().unwrap(), *px.iter().max().unwrap());
            prop_assert!(out.pixels().iter().all(|&v| v >= lo && v <= hi));
        }
    }
}
