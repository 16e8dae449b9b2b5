import { describe, expect, it } from 'vitest';

import { armAngle, computePose, dragToPosition, renderPatientSvg } from '../src/patient.js';
import type { ObservedVariables } from '../src/types.js';

function baseState(overrides: Partial<ObservedVariables> = {}): ObservedVariables {
  return {
    posture: 'standing',
    eyes: 'open',
    arms_extended: false,
    left_arm_pos: 'neutral',
    left_arm_elevation: 0.5,
    right_arm_pos: 'neutral',
    right_arm_elevation: 0.5,
    head: 'neutral',
    ...overrides,
  };
}

describe('armAngle', () => {
  it('raises extended arms to horizontal at full elevation', () => {
    expect(armAngle('forward', 1.0)).toBe(90);
  });

  it('lowers the arm as elevation drifts down', () => {
    expect(armAngle('forward', 0.7)).toBeLessThan(armAngle('forward', 1.0));
    expect(armAngle('down', 0.4)).toBeLessThan(armAngle('forward', 0.7));
  });
});

describe('computePose', () => {
  it('reflects posture and eye state', () => {
    const pose = computePose(baseState({ posture: 'sitting', eyes: 'closed' }));
    expect(pose.seated).toBe(true);
    expect(pose.eyesClosed).toBe(true);
  });

  it('shows asymmetry when one extended arm has drifted', () => {
    const pose = computePose(
      baseState({
        eyes: 'closed',
        arms_extended: true,
        left_arm_pos: 'forward',
        left_arm_elevation: 1.0,
        right_arm_pos: 'forward',
        right_arm_elevation: 0.7,
      }),
    );
    expect(pose.rightArm.angle).toBeLessThan(pose.leftArm.angle);
    expect(pose.leftArm.angle).toBe(90);
  });
});

describe('renderPatientSvg', () => {
  it('tags each draggable limb for hit testing', () => {
    const svg = renderPatientSvg(baseState());
    expect(svg).toContain('data-limb="left_arm"');
    expect(svg).toContain('data-limb="right_arm"');
    expect(svg).toContain('data-limb="head"');
  });

  it('draws closed eyes as lines and open eyes as circles', () => {
    expect(renderPatientSvg(baseState({ eyes: 'closed' }))).toContain('<line class="eye"');
    expect(renderPatientSvg(baseState())).toContain('<circle class="eye"');
  });

  it('marks the posture on the root element', () => {
    expect(renderPatientSvg(baseState({ posture: 'sitting' }))).toContain('seated');
    expect(renderPatientSvg(baseState())).toContain('standing');
  });
});

describe('dragToPosition', () => {
  it('maps vertical arm drags to up and down', () => {
    expect(dragToPosition('left_arm', 0, -40)).toBe('up');
    expect(dragToPosition('left_arm', 0, 40)).toBe('down');
    expect(dragToPosition('left_arm', 3, 4)).toBe('neutral');
  });

  it('maps horizontal head drags to left and right', () => {
    expect(dragToPosition('head', -30, 0)).toBe('left');
    expect(dragToPosition('head', 30, 0)).toBe('right');
    expect(dragToPosition('head', 2, 50)).toBe('neutral');
  });
});
