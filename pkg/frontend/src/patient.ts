/**
 * 2D schematic patient view.
 *
 * The observed-variable vector is the ground truth; this module computes
 * a pose (pure, testable) and renders it as an SVG string whose limb
 * shapes carry data-limb attributes for drag-to-manipulate hit testing.
 */

import type { ObservedVariables } from './types.js';

export interface ArmPose {
  /** Angle in degrees from hanging straight down (0) to raised overhead (180). */
  angle: number;
}

export interface Pose {
  seated: boolean;
  eyesClosed: boolean;
  leftArm: ArmPose;
  rightArm: ArmPose;
  headTilt: number;
}

/** Arm angle for a position, scaled by elevation so drift visibly lowers the arm. */
export function armAngle(position: string, elevation: number): number {
  switch (position) {
    case 'up':
      return 180 * elevation;
    case 'forward':
      return 90 * elevation;
    case 'down':
      return 90 * elevation; // a dropped drifting arm keeps its residual elevation
    default:
      return 20; // neutral: hanging loosely
  }
}

const HEAD_TILT: Record<string, number> = { left: -20, right: 20, up: 0, down: 0, neutral: 0 };

export function computePose(state: ObservedVariables): Pose {
  return {
    seated: state.posture === 'sitting',
    eyesClosed: state.eyes === 'closed',
    leftArm: { angle: armAngle(state.left_arm_pos, state.left_arm_elevation) },
    rightArm: { angle: armAngle(state.right_arm_pos, state.right_arm_elevation) },
    headTilt: HEAD_TILT[state.head] ?? 0,
  };
}

const SHOULDER_Y = 70;
const ARM_LENGTH = 45;

function armLine(side: 'left' | 'right', pose: ArmPose): string {
  const shoulderX = side === 'left' ? 80 : 120;
  const direction = side === 'left' ? -1 : 1;
  const radians = ((pose.angle - 90) * Math.PI) / 180;
  const handX = shoulderX + direction * ARM_LENGTH * Math.cos(radians);
  const handY = SHOULDER_Y - ARM_LENGTH * Math.sin(radians);
  return (
    `<line data-limb="${side}_arm" class="limb" x1="${shoulderX}" y1="${SHOULDER_Y}" ` +
    `x2="${handX.toFixed(1)}" y2="${handY.toFixed(1)}" />`
  );
}

export function renderPatientSvg(state: ObservedVariables): string {
  const pose = computePose(state);
  const torsoBottom = pose.seated ? 130 : 160;
  const eyes = pose.eyesClosed
    ? '<line class="eye" x1="92" y1="40" x2="98" y2="40" /><line class="eye" x1="102" y1="40" x2="108" y2="40" />'
    : '<circle class="eye" cx="95" cy="40" r="2" /><circle class="eye" cx="105" cy="40" r="2" />';
  return [
    `<svg viewBox="0 0 200 200" class="patient ${pose.seated ? 'seated' : 'standing'}">`,
    `<g data-limb="head" class="limb" transform="rotate(${pose.headTilt} 100 42)">`,
    '<circle cx="100" cy="42" r="16" class="head-shape" />',
    eyes,
    '</g>',
    `<line class="torso" x1="100" y1="58" x2="100" y2="${torsoBottom}" />`,
    armLine('left', pose.leftArm),
    armLine('right', pose.rightArm),
    '</svg>',
  ].join('');
}

/**
 * Translate a vertical drag on a limb into a target position.
 * Upward drags raise the arm, downward drags lower it; small drags
 * return it to neutral. For the head, horizontal movement dominates.
 */
export function dragToPosition(limb: string, dx: number, dy: number): string {
  if (limb === 'head') {
    if (Math.abs(dx) < 10) return 'neutral';
    return dx < 0 ? 'left' : 'right';
  }
  if (Math.abs(dy) < 10) return 'neutral';
  return dy < 0 ? 'up' : 'down';
}
