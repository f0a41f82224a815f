"""Image preprocessing applied before encoding.

Only square letterboxing ships; device-mockup compositing is exposed
as a hook that takes a caller-supplied template since no artwork is
bundled.
"""
from __future__ import annotations

from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .errors import UnsupportedImageFormat

LETTERBOX_FILL = (255, 255, 255)


def load_image(path: str | Path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
        return img.convert("RGB")
    except (UnidentifiedImageError, OSError) as exc:
        raise UnsupportedImageFormat(f"cannot decode image {path}: {exc}") from exc


def pad_to_square(image: Image.Image, fill: tuple[int, int, int] = LETTERBOX_FILL) -> Image.Image:
    """Center the image on an SxS canvas, S = max(W, H), solid fill bands.

    Content pixels are copied unscaled, so the aspect ratio is exact.
    """
    w, h = image.size
    if w == h:
        return image.copy()
    side = max(w, h)
    canvas = Image.new("RGB", (side, side), fill)
    canvas.paste(image, ((side - w) // 2, (side - h) // 2))
    return canvas


def apply_mockup(
    image: Image.Image,
    template: Image.Image,
    inset: tuple[int, int, int, int],
) -> Image.Image:
    """Composite a screenshot into a device-frame template.

    inset is the (left, top, width, height) screen rectangle of the
    template; the screenshot is resized to fill it.
    """
    left, top, width, height = inset
    if width <= 0 or height <= 0:
        raise ValueError("inset rectangle must have positive size")
    out = template.convert("RGB").copy()
    out.paste(image.resize((width, height)), (left, top))
    return out
