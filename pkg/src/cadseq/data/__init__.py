"""Dataset mechanics: augmentation, splits, point clouds, cameras, captions."""
from .captions import (CAPTION_PROMPT, REQUIRED_PREFIX, CaptionConfig, CaptionRequest,
                       HttpCaptionClient, StubCaptionClient, build_caption_request,
                       caption_batch, caption_with_client, client_from_config,
                       load_caption_config)
from .pipeline import (CAMERA_RADIUS, NOISE_LEVELS, REMOVAL_LEVELS, CameraPose, DatasetRecord,
                       augment_prefixes, augment_training, camera_poses, decimate_points,
                       derive_seed, export_point_cloud, kept_count, leaked_roots,
                       perturb_points, read_manifest, split_dataset, write_manifest)
from .pointio import read_cloud, read_ply, read_xyz, write_cloud, write_ply, write_xyz
