/** Response shapes of the annotation service API. */

export interface Status {
  cycle: number;
  labeled: number;
  unlabeled: number;
  pending: number;
  consumed: number;
  total_budget: number;
  strategy: string;
  busy: boolean;
  done: boolean;
  error: string | null;
}

export interface Meta {
  num_classes: number;
  class_names: string[];
  color_map: number[][];
  height: number;
  width: number;
}

export interface QueueItem {
  sample_id: string;
  status: string;
  score: number | null;
}

export interface ThresholdStats {
  mean: number;
  std: number;
  gamma: number;
  theta: number;
}

export interface CycleRecord {
  cycle: number;
  miou: number | null;
  iou: (number | null)[];
  weights: (number | null)[] | null;
  theta: ThresholdStats | null;
  selected_ids: string[];
  filled_below_threshold: number;
  wall_time_s: number;
}

export interface LabelAccepted {
  id: string;
  labeled: number;
  pending: number;
  cycle: number;
}

export interface AdvanceResponse {
  advancing: boolean;
  reason: string | null;
}
