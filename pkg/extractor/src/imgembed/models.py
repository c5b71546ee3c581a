"""Embedding model registry: construction, preprocessing, output dims.

Two backbones are supported:

  inception-v3      ImageNet-pretrained Inception v3; embeddings are the
                    2048-d penultimate (pre-classifier) activations.
  clip-vitl14-336   CLIP ViT-L/14 at 336 px; embeddings are the 768-d
                    projected image-encoder output.

Weights come from one of three sources: the usual pretrained download
(default), a local state-dict file, or a seeded random initialization of
the same architecture (--init-seed). The seeded mode exists so the full
pipeline stays testable on machines without model-hub access; embeddings
from it are obviously not semantically meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torchvision import models as tvm
from torchvision import transforms
from torchvision.transforms import InterpolationMode

_CLIP_MEAN = (0.48145466, 0.4578275, 0.40821073)
_CLIP_STD = (0.26862954, 0.26130258, 0.27577711)
_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    dim: int
    resize: int      # shorter-side target for the aspect-preserving resize
    crop: int        # square center-crop edge (the model's native input)
    mean: tuple
    std: tuple


SPECS = {
    "inception-v3": ModelSpec(
        name="inception-v3", dim=2048, resize=342, crop=299,
        mean=_IMAGENET_MEAN, std=_IMAGENET_STD,
    ),
    "clip-vitl14-336": ModelSpec(
        name="clip-vitl14-336", dim=768, resize=336, crop=336,
        mean=_CLIP_MEAN, std=_CLIP_STD,
    ),
}


def preprocessor(spec: ModelSpec) -> transforms.Compose:
    """Bicubic antialiased resize, center crop, normalize."""
    return transforms.Compose(
        [
            transforms.Resize(spec.resize, interpolation=InterpolationMode.BICUBIC, antialias=True),
            transforms.CenterCrop(spec.crop),
            transforms.ToTensor(),
            transforms.Normalize(mean=spec.mean, std=spec.std),
        ]
    )


class _InceptionEmbedder(torch.nn.Module):
    def __init__(self, net):
        super().__init__()
        net.fc = torch.nn.Identity()  # expose the 2048-d pooled activations
        net.aux_logits = False
        net.AuxLogits = None
        self.net = net

    def forward(self, batch):
        return self.net(batch)


class _ClipEmbedder(torch.nn.Module):
    def __init__(self, net):
        super().__init__()
        self.net = net

    def forward(self, batch):
        return self.net(pixel_values=batch).image_embeds


def _clip_vitl14_336_config():
    from transformers import CLIPVisionConfig

    # ViT-L/14 at 336 px: 24 layers, width 1024, 16 heads, patch 14,
    # projected embedding width 768
    return CLIPVisionConfig(
        hidden_size=1024,
        intermediate_size=4096,
        num_hidden_layers=24,
        num_attention_heads=16,
        image_size=336,
        patch_size=14,
        projection_dim=768,
    )


def build_model(
    model_name: str,
    weights: str | None = None,
    init_seed: int | None = None,
    device: str = "cpu",
) -> torch.nn.Module:
    """Construct the embedder in eval mode on the requested device.

    Exactly one weight source applies: ``init_seed`` (seeded random init),
    ``weights`` (local state-dict path), or neither (pretrained download).
    """
    if model_name not in SPECS:
        raise ValueError(f"unknown model {model_name!r}; choose from {sorted(SPECS)}")
    if weights is not None and init_seed is not None:
        raise ValueError("pass either a weights file or an init seed, not both")

    if init_seed is not None:
        torch.manual_seed(init_seed)

    if model_name == "inception-v3":
        if init_seed is not None or weights is not None:
            net = tvm.inception_v3(weights=None, init_weights=True)
            if weights is not None:
                net.load_state_dict(torch.load(weights, map_location="cpu"))
        else:
            net = tvm.inception_v3(weights=tvm.Inception_V3_Weights.IMAGENET1K_V1)
        model = _InceptionEmbedder(net)
    else:
        from transformers import CLIPVisionModelWithProjection

        if init_seed is not None or weights is not None:
            net = CLIPVisionModelWithProjection(_clip_vitl14_336_config())
            if weights is not None:
                net.load_state_dict(torch.load(weights, map_location="cpu"))
        else:
            net = CLIPVisionModelWithProjection.from_pretrained("openai/clip-vit-large-patch14-336")
        model = _ClipEmbedder(net)

    model.eval()
    return model.to(device)
