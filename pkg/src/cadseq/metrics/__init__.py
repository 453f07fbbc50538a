"""Mesh topology/enclosure metrics and point-cloud reconstruction metrics."""
from .topology import (HalfEdgeIndex, TopoReport, build_half_edge, dangling_edge_length,
                       flux_enclosure_error, flux_terms, seg_error, segment_count,
                       self_intersection_ratio, topo_report)
from .tritri import EPS_INT, intersecting_faces, tri_tri_intersect
from .recon import (F_TAU, N_POINTS, PointCloud, chamfer_distance, f_score, nearest,
                    normal_consistency, normalize_pair, precision_recall, sample_surface)
