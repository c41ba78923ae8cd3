"""Parameter models and result records"""
