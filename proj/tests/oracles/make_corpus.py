#!/usr/bin/env python3
"""Builds the test image corpus from scikit-image's bundled sample photos.

Writes 8-bit PGM luma planes to tests/data/corpus (256x256 crops) and
reference/distorted pairs to tests/data/metric_pairs. Luma conversion uses
Y = round(0.299 R + 0.587 G + 0.114 B), the same rule as the C++ loader.
Run once; the outputs are committed.
"""
import io
import os

import numpy as np
import skimage.data as sk
from PIL import Image, ImageFilter

ROOT = os.path.join(os.path.dirname(__file__), "..", "data")


def luma(img):
    if img.ndim == 2:
        return img.astype(np.uint8)
    rgb = img[..., :3].astype(np.float64)
    y = np.round(0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2])
    return np.clip(y, 0, 255).astype(np.uint8)


def write_pgm(path, plane):
    h, w = plane.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(plane, dtype=np.uint8).tobytes())


def crop(plane, top, left, h=256, w=256):
    return plane[top:top + h, left:left + w]


def resize(plane, w, h):
    return np.asarray(Image.fromarray(plane).resize((w, h), Image.LANCZOS))


def corpus():
    cam = luma(sk.camera())
    ast = luma(sk.astronaut())
    cof = luma(sk.coffee())
    roc = luma(sk.rocket())
    return [
        resize(cam, 256, 256),
        crop(cam, 100, 150),
        resize(ast, 256, 256),
        crop(ast, 0, 128),
        crop(luma(sk.coins()), 20, 60),
        crop(luma(sk.moon()), 128, 128),
        resize(cof[:, 100:500], 256, 256),
        crop(cof, 100, 300),
        crop(luma(sk.chelsea()), 20, 100),
        crop(luma(sk.cat()), 40, 180),
        crop(roc, 100, 200),
        resize(roc[:, 100:527], 256, 256),
        crop(luma(sk.brick()), 0, 0),
        crop(luma(sk.grass()), 200, 100),
        crop(luma(sk.gravel()), 50, 250),
        crop(luma(sk.cell()), 200, 150),
        crop(luma(sk.clock()), 30, 100),
        resize(luma(sk.hubble_deep_field())[:800, :800], 256, 256),
        crop(luma(sk.immunohistochemistry()), 100, 100),
        resize(luma(sk.retina()), 256, 256),
        crop(luma(sk.colorwheel()), 50, 50),
        resize(crop(cam, 0, 0, 512, 512)[::-1, :], 256, 256),
    ]


def jpeg(plane, quality):
    buf = io.BytesIO()
    Image.fromarray(plane).save(buf, format="JPEG", quality=quality)
    return np.asarray(Image.open(io.BytesIO(buf.getvalue())).convert("L"))


def blur(plane, radius):
    return np.asarray(Image.fromarray(plane).filter(ImageFilter.GaussianBlur(radius)))


def noise(plane, sigma, seed):
    rng = np.random.default_rng(seed)
    n = plane.astype(np.float64) + rng.normal(0.0, sigma, plane.shape)
    return np.clip(np.round(n), 0, 255).astype(np.uint8)


def contrast(plane, factor):
    p = plane.astype(np.float64)
    m = p.mean()
    return np.clip(np.round(m + factor * (p - m)), 0, 255).astype(np.uint8)


def metric_pairs(photos):
    cam = luma(sk.camera())
    ast = luma(sk.astronaut())
    return [
        ("jpeg10", photos[0], jpeg(photos[0], 10)),
        ("jpeg30", photos[2], jpeg(photos[2], 30)),
        ("jpeg50", photos[6], jpeg(photos[6], 50)),
        ("jpeg75", photos[8], jpeg(photos[8], 75)),
        ("blur", photos[10], blur(photos[10], 1.5)),
        ("noise", photos[12], noise(photos[12], 10.0, 7)),
        ("contrast", photos[16], contrast(photos[16], 0.7)),
        ("large_jpeg20", crop(cam, 64, 0, 384, 512), jpeg(crop(cam, 64, 0, 384, 512), 20)),
        ("large_blur", crop(ast, 0, 0, 384, 512), blur(crop(ast, 0, 0, 384, 512), 1.0)),
        ("rect_noise", crop(photos[18], 0, 0, 184, 200), noise(crop(photos[18], 0, 0, 184, 200), 6.0, 11)),
    ]


def main():
    photos = corpus()
    for i, p in enumerate(photos):
        assert p.shape == (256, 256), (i, p.shape)
        write_pgm(os.path.join(ROOT, "corpus", "photo_%02d.pgm" % i), p)
    for name, ref, dist in metric_pairs(photos):
        assert ref.shape == dist.shape
        write_pgm(os.path.join(ROOT, "metric_pairs", name + "_ref.pgm"), ref)
        write_pgm(os.path.join(ROOT, "metric_pairs", name + "_dist.pgm"), dist)


if __name__ == "__main__":
    main()
