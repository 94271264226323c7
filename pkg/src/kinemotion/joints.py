"""Azure Kinect DK 32-joint enumeration and the body-group aggregation map."""

N_JOINTS = 32

# Sensor SDK enumeration order; downstream indices depend on it.
JOINT_NAMES = (
    "PELVIS",          # 0
    "SPINE_NAVEL",     # 1
    "SPINE_CHEST",     # 2
    "NECK",            # 3
    "CLAVICLE_LEFT",   # 4
    "SHOULDER_LEFT",   # 5
    "ELBOW_LEFT",      # 6
    "WRIST_LEFT",      # 7
    "HAND_LEFT",       # 8
    "HANDTIP_LEFT",    # 9
    "THUMB_LEFT",      # 10
    "CLAVICLE_RIGHT",  # 11
    "SHOULDER_RIGHT",  # 12
    "ELBOW_RIGHT",     # 13
    "WRIST_RIGHT",     # 14
    "HAND_RIGHT",      # 15
    "HANDTIP_RIGHT",   # 16
    "THUMB_RIGHT",     # 17
    "HIP_LEFT",        # 18
    "KNEE_LEFT",       # 19
    "ANKLE_LEFT",      # 20
    "FOOT_LEFT",       # 21
    "HIP_RIGHT",       # 22
    "KNEE_RIGHT",      # 23
    "ANKLE_RIGHT",     # 24
    "FOOT_RIGHT",      # 25
    "HEAD",            # 26
    "NOSE",            # 27
    "EYE_LEFT",        # 28
    "EAR_LEFT",        # 29
    "EYE_RIGHT",       # 30
    "EAR_RIGHT",       # 31
)

JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}

# Anatomical groups for feature aggregation. Order is load-bearing: it fixes
# the layout of the 160-dim feature vector. Every joint appears exactly once.
BODY_GROUPS = (
    ("head", ("HEAD", "NOSE", "EYE_LEFT", "EYE_RIGHT", "EAR_LEFT", "EAR_RIGHT")),
    ("body", ("PELVIS", "SPINE_NAVEL", "SPINE_CHEST", "NECK", "CLAVICLE_LEFT", "CLAVICLE_RIGHT")),
    ("arm_left", ("SHOULDER_LEFT", "ELBOW_LEFT", "WRIST_LEFT")),
    ("arm_right", ("SHOULDER_RIGHT", "ELBOW_RIGHT", "WRIST_RIGHT")),
    ("hand_left", ("HAND_LEFT", "HANDTIP_LEFT", "THUMB_LEFT")),
    ("hand_right", ("HAND_RIGHT", "HANDTIP_RIGHT", "THUMB_RIGHT")),
    ("leg_left", ("HIP_LEFT", "KNEE_LEFT", "ANKLE_LEFT")),
    ("leg_right", ("HIP_RIGHT", "KNEE_RIGHT", "ANKLE_RIGHT")),
    ("foot_left", ("FOOT_LEFT",)),
    ("foot_right", ("FOOT_RIGHT",)),
)

GROUP_NAMES = tuple(name for name, _ in BODY_GROUPS)

GROUP_MEMBERS = {
    name: tuple(JOINT_INDEX[j] for j in joints) for name, joints in BODY_GROUPS
}

_all_members = [i for name, _ in BODY_GROUPS for i in GROUP_MEMBERS[name]]
assert sorted(_all_members) == list(range(N_JOINTS)), "groups must partition the 32 joints"
