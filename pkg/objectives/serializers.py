from rest_framework import serializers


class EpochRecordSerializer(serializers.Serializer):
    """One line of the JSON-lines training log."""
    epoch = serializers.IntegerField(min_value=1)
    l_entry = serializers.FloatField()
    l_sym = serializers.FloatField()
    l_imp = serializers.FloatField()
    dev_ent_f1 = serializers.FloatField()
    dev_rel_f1 = serializers.FloatField()
    lr = serializers.FloatField()


class TrainingSummarySerializer(serializers.Serializer):
    """Run summary written next to a checkpoint: configuration and selection outcome."""
    config = serializers.DictField()
    epochs = serializers.IntegerField(min_value=0)
    best_epoch = serializers.IntegerField(allow_null=True)
    best_score = serializers.FloatField(allow_null=True)
    stopped_early = serializers.BooleanField()

    def to_representation(self, instance):
        result, config = instance['result'], instance['config']
        best_score = result.best_score if result.best_epoch is not None else None
        return super().to_representation({
            'config': config.as_dict(),
            'epochs': len(result.log),
            'best_epoch': result.best_epoch,
            'best_score': best_score,
            'stopped_early': result.stopped_early,
        })
