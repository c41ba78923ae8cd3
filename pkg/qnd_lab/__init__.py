"""QND decoherence lab: squeezed-bath kernels, channels and phase-space diffusion"""
__version__ = "1.0.0"
